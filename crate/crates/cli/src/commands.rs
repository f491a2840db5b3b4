use std::fmt;
use std::path::Path;

use aniso_core::azimuthal::qc_transition_radius;
use aniso_core::{anisometry, bound, AzimuthalMap, BoundQuery, Error, MapClass, ModelSpace, Profile, TaylorKind, Tolerance};

use crate::args::{BoundsArgs, ClassArg, FamilyArg, Format, MapArgs, OutputArgs, TaylorArgs};
use crate::grid_file::GridFile;
use crate::table::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    /// Flag combination rejected after parsing; reported with usage text.
    Usage { command: &'static str, message: String },
    Io { path: String, source: std::io::Error },
    Core(Error),
    /// A verification suite ran and at least one check failed.
    ChecksFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { message, .. } => f.write_str(message),
            CliError::Io { path, source } => write!(f, "cannot write '{path}': {source}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::ChecksFailed => f.write_str("verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

fn usage(command: &'static str, message: impl Into<String>) -> CliError {
    CliError::Usage {
        command,
        message: message.into(),
    }
}

pub(crate) fn sampler_tolerance() -> Tolerance {
    Tolerance::new(1e-13, 0.0, 200).expect("valid tolerance")
}

pub(crate) fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(table: &Table, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("serializable") + "\n",
    };
    write_output(output.out.as_deref(), &text)
}

/// Short machine-readable reason for a cell that produced no bound.
fn status_of(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) | Error::InvalidDimension { .. } => "invalid_parameter",
        Error::HemisphereExceeded { .. } => "hemisphere_exceeded",
        Error::Blowup { .. } => "blowup",
        _ => "error",
    }
}

fn flag_positive(command: &'static str, flag: &str, value: Option<f64>) -> Result<f64, CliError> {
    match value {
        None => Ok(f64::INFINITY),
        Some(v) if v > 0.0 => Ok(v),
        Some(v) => Err(usage(command, format!("--{flag} must be positive, got {v}"))),
    }
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let class = match (args.class, args.q) {
        (ClassArg::Quasiconformal, Some(q)) if q >= 1.0 && q.is_finite() => MapClass::Quasiconformal { q },
        (ClassArg::Quasiconformal, Some(q)) => return Err(usage("bounds", format!("--Q must be a finite value >= 1, got {q}"))),
        (ClassArg::Quasiconformal, None) => return Err(usage("bounds", "--class quasiconformal requires --Q")),
        (_, Some(_)) => return Err(usage("bounds", "--Q is only accepted with --class quasiconformal")),
        (ClassArg::General, None) => MapClass::General,
        (ClassArg::VolumePreserving, None) => MapClass::VolumePreserving,
        (ClassArg::Conformal, None) => MapClass::Conformal,
    };
    let inj_m = flag_positive("bounds", "inj-m", args.inj_m)?;
    let inj_n = flag_positive("bounds", "inj-n", args.inj_n)?;
    if args.n < 2 {
        return Err(usage("bounds", format!("--n must be at least 2, got {}", args.n)));
    }
    let q_cell = match class {
        MapClass::Quasiconformal { q } => Cell::Num(q),
        _ => Cell::Empty,
    };

    let mut table = Table::new(vec![
        "rho",
        "kappa",
        "alpha",
        "n",
        "class",
        "Q",
        "status",
        "value",
        "sigma1",
        "sigma2",
        "validity_radius",
        "validity_ok",
    ]);
    let tol = sampler_tolerance();
    for &rho in &args.rho {
        for &kappa in &args.kappa {
            for &alpha in &args.alpha {
                let mut row = vec![
                    Cell::Num(rho),
                    Cell::Num(kappa),
                    Cell::Num(alpha),
                    Cell::Int(args.n as i64),
                    Cell::Text(class.name().into()),
                    q_cell.clone(),
                ];
                if kappa > rho {
                    eprintln!("warning: skipping kappa = {kappa} > rho = {rho}");
                    row.push(Cell::Text("invalid_pair".into()));
                    row.extend(std::iter::repeat_n(Cell::Empty, 5));
                    table.push(row);
                    continue;
                }
                let result = BoundQuery::new(rho, kappa, args.n, alpha, class)
                    .and_then(|q| q.with_injectivity(inj_m, inj_n))
                    .and_then(|q| bound(&q))
                    .and_then(|res| anisometry(&res.optimal_map, &tol).map(|rep| (res, rep)));
                match result {
                    Ok((res, rep)) => row.extend([
                        Cell::Text("ok".into()),
                        Cell::Num(res.value),
                        Cell::Num(rep.sigma1),
                        Cell::Num(rep.sigma2),
                        Cell::Num(res.validity_radius),
                        Cell::Bool(res.validity_ok),
                    ]),
                    Err(e) => {
                        eprintln!("warning: rho = {rho}, kappa = {kappa}, alpha = {alpha}: {e}");
                        row.push(Cell::Text(status_of(&e).into()));
                        row.extend(std::iter::repeat_n(Cell::Empty, 5));
                    }
                }
                table.push(row);
            }
        }
    }
    emit(&table, &args.output)
}

fn require(command: &'static str, flag: &str, family: &str, value: Option<f64>) -> Result<f64, CliError> {
    value.ok_or_else(|| usage(command, format!("--family {family} requires --{flag}")))
}

fn reject(command: &'static str, family: &str, flags: &[(&str, bool)]) -> Result<(), CliError> {
    match flags.iter().find(|(_, given)| *given) {
        Some((flag, _)) => Err(usage(command, format!("--{flag} is not accepted with --family {family}"))),
        None => Ok(()),
    }
}

pub fn map_profile(args: &MapArgs) -> Result<Profile, CliError> {
    let (sigma, q, beta) = (args.sigma.is_some(), args.q.is_some(), args.beta.is_some());
    Ok(match args.family {
        FamilyArg::Equidistant => {
            reject("map", "equidistant", &[("sigma", sigma), ("Q", q), ("beta", beta)])?;
            Profile::Equidistant
        }
        FamilyArg::VolumePreserving => {
            reject("map", "volume-preserving", &[("sigma", sigma), ("Q", q), ("beta", beta)])?;
            Profile::VolumePreserving
        }
        FamilyArg::Contracting => {
            reject("map", "contracting", &[("Q", q), ("beta", beta)])?;
            Profile::Contracting {
                sigma: require("map", "sigma", "contracting", args.sigma)?,
            }
        }
        FamilyArg::Conformal => {
            reject("map", "conformal", &[("Q", q), ("beta", beta)])?;
            Profile::Conformal {
                sigma: require("map", "sigma", "conformal", args.sigma)?,
            }
        }
        FamilyArg::Quasiconformal => {
            let sigma = require("map", "sigma", "quasiconformal", args.sigma)?;
            let q = require("map", "Q", "quasiconformal", args.q)?;
            let beta = match args.beta {
                Some(b) => b,
                None => qc_transition_radius(args.rho, args.kappa, q, sigma, args.alpha)?.ok_or_else(|| {
                    CliError::Core(Error::InvalidParameter(format!(
                        "no transition radius below alpha = {} for Q = {q}, sigma = {sigma}",
                        args.alpha
                    )))
                })?,
            };
            Profile::QuasiconformalOptimal { q, sigma, beta }
        }
    })
}

pub fn cmd_map(args: &MapArgs) -> Result<(), CliError> {
    if args.resolution < 2 {
        return Err(usage("map", format!("--resolution must be at least 2, got {}", args.resolution)));
    }
    let profile = map_profile(args)?;
    let map = AzimuthalMap::new(args.rho, args.kappa, args.n, args.alpha, profile)?;
    let grid = map.project_grid(args.resolution)?;
    let file = GridFile::from(&grid);
    if let Some(r) = file.blowup_radius {
        eprintln!("warning: image escapes to infinity at t = {r}; grid truncated");
    }
    let text = match args.output.format {
        Format::Csv => file.to_csv(),
        Format::Json => serde_json::to_string_pretty(&file).expect("serializable") + "\n",
    };
    write_output(args.output.out.as_deref(), &text)
}

pub fn cmd_taylor(args: &TaylorArgs) -> Result<(), CliError> {
    let kinds: Vec<TaylorKind> = match args.kind {
        Some(k) => vec![k],
        None => TaylorKind::ALL.to_vec(),
    };
    let mut table = Table::new(vec!["kind", "n", "kappa", "term", "exponent", "coefficient"]);
    for &kappa in &args.kappa {
        let space = ModelSpace::new(args.n, kappa)?;
        for &kind in &kinds {
            for (i, (e, c)) in space.taylor_coeffs(kind).terms.into_iter().enumerate() {
                table.push(vec![
                    Cell::Text(kind.name().into()),
                    Cell::Int(args.n as i64),
                    Cell::Num(kappa),
                    Cell::Int(i as i64),
                    Cell::Num(e),
                    Cell::Num(c),
                ]);
            }
        }
    }
    emit(&table, &args.output)
}
