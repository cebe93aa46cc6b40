//! The five commands. Each turns a [`RunConfig`] into report text; the only
//! arithmetic here is formatting.

use serde::Serialize;
use superspin::interaction::{check_conditions, mu_from_alphas, mu_from_betas, mu_squared_diagonal, Condition};
use superspin::lattice::{
    casimir_check, commutator_study, ladder_check, ladder_plane, CasimirReport, LadderReport, Pair, Verdict,
};
use superspin::radial::{degeneracy_report, match_level, solve_sectors, DegeneracyReport, Multiplet, Spectrum};
use superspin::spin::SpinRep;
use superspin::{build_spin_rep, Error, InteractionSpec};

use crate::config::{ConfigError, RunConfig};
use crate::format::{csv, json, num, opt_int, opt_num, rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// μ(φ) entries at the configured angles, plus the diagonal of μ².
    MuTable,
    /// Bound energies per J_z sector with closed-form matches.
    Spectrum,
    /// Cross-sector multiplets.
    Degeneracy,
    /// Interaction conditions and commutator residual studies.
    Verify,
    /// Ladder action of A_+ and the Casimir relation per multiplet.
    Ladder,
}

impl Command {
    pub fn default_format(self) -> Format {
        match self {
            Command::MuTable | Command::Spectrum | Command::Degeneracy => Format::Csv,
            Command::Verify | Command::Ladder => Format::Json,
        }
    }
}

/// What a successful run produced. `verified` is false when a verification
/// command found a failing check (exit code 1).
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub verified: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Computation(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Computation(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Computation(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => Failure::Computation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    match command {
        Command::MuTable => mu_table(cfg, format),
        Command::Spectrum => spectrum(cfg, format),
        Command::Degeneracy => degeneracy(cfg, format),
        Command::Verify => verify(cfg, format),
        Command::Ladder => ladder(cfg, format),
    }
}

fn ok(text: String) -> Result<Output, Failure> {
    Ok(Output { text, verified: true })
}

#[derive(Serialize)]
struct Entry {
    row_two_k: i32,
    col_two_k: i32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct AngleTable {
    phi: f64,
    entries: Vec<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_entries: Option<Vec<Entry>>,
}

#[derive(Serialize)]
struct DiagEntry {
    two_k: i32,
    k: String,
    value: f64,
}

#[derive(Serialize)]
struct MuTable {
    two_s: i32,
    angles: Vec<AngleTable>,
    mu_squared_diagonal: Vec<DiagEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_form_difference: Option<f64>,
}

fn entries(rep: &SpinRep, m: &superspin::interaction::MuMatrix) -> Vec<Entry> {
    let mut out = Vec::new();
    for r in 0..rep.dim {
        for c in 0..rep.dim {
            let z = m.m[(r, c)];
            out.push(Entry {
                row_two_k: rep.two_k(r),
                col_two_k: rep.two_k(c),
                re: z.re,
                im: z.im,
            });
        }
    }
    out
}

fn mu_table(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    let spec = cfg.spec()?;
    let rep = build_spin_rep(spec.two_s())?;
    // the beta form is shown next to the alpha form only when both were given
    let betas = if cfg.alphas.is_some() { cfg.beta_spec()? } else { None };
    let mut diff: Option<f64> = None;
    let mut angles = Vec::new();
    for phi in cfg.angles() {
        let a = mu_from_alphas(&spec, phi)?;
        let beta_entries = match &betas {
            Some(b) => {
                let m = mu_from_betas(b, phi, &rep)?;
                let d = (&m.m - &a.m).iter().map(|z| z.norm()).fold(0.0, f64::max);
                diff = Some(diff.map_or(d, |x: f64| x.max(d)));
                Some(entries(&rep, &m))
            }
            None => None,
        };
        angles.push(AngleTable {
            phi,
            entries: entries(&rep, &a),
            beta_entries,
        });
    }
    let diag: Vec<DiagEntry> = mu_squared_diagonal(&spec)
        .into_iter()
        .enumerate()
        .map(|(i, value)| DiagEntry {
            two_k: rep.two_k(i),
            k: rational(rep.two_k(i)),
            value,
        })
        .collect();
    let table = MuTable {
        two_s: spec.two_s(),
        angles,
        mu_squared_diagonal: diag,
        max_form_difference: diff,
    };
    match format {
        Format::Json => ok(json(&table)),
        Format::Csv => {
            let mut rows = Vec::new();
            for a in &table.angles {
                let sections = std::iter::once(("mu", &a.entries)).chain(a.beta_entries.iter().map(|e| ("mu_beta", e)));
                for (section, es) in sections {
                    for e in es {
                        rows.push(vec![
                            section.to_string(),
                            num(a.phi),
                            e.row_two_k.to_string(),
                            e.col_two_k.to_string(),
                            rational(e.row_two_k),
                            rational(e.col_two_k),
                            num(e.re),
                            num(e.im),
                        ]);
                    }
                }
            }
            for d in &table.mu_squared_diagonal {
                rows.push(vec![
                    "mu_squared".into(),
                    String::new(),
                    d.two_k.to_string(),
                    d.two_k.to_string(),
                    d.k.clone(),
                    d.k.clone(),
                    num(d.value),
                    "0".into(),
                ]);
            }
            if let Some(d) = table.max_form_difference {
                rows.push(vec![
                    "max_form_difference".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    num(d),
                    "0".into(),
                ]);
            }
            ok(csv(&["section", "phi", "row_two_k", "col_two_k", "row_k", "col_k", "re", "im"], &rows))
        }
    }
}

fn solve(cfg: &RunConfig, spec: &InteractionSpec) -> Result<(Vec<Spectrum>, DegeneracyReport), Failure> {
    let grid = cfg.radial_grid(spec)?;
    let spectra = solve_sectors(spec, cfg.mass, cfg.sector_range(), &grid, &cfg.solve_options())?;
    let report = degeneracy_report(&spectra, spec, cfg.tolerances.rel_tol)?;
    Ok((spectra, report))
}

#[derive(Serialize)]
struct SpectrumRow {
    two_jz: i32,
    jz: String,
    level_index: usize,
    energy: f64,
    inferred_two_j: Option<i32>,
    channel_two_k: i32,
    predicted_energy: Option<f64>,
    rel_err: Option<f64>,
}

fn spectrum(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    let spec = cfg.spec()?;
    let (spectra, report) = solve(cfg, &spec)?;
    let mut rows = Vec::new();
    for s in &spectra {
        for (i, state) in s.states.iter().enumerate() {
            let owner = report
                .multiplets
                .iter()
                .find(|m| m.members.iter().any(|x| x.two_jz == s.two_jz() && x.level_index == i));
            let matched = owner.and_then(|m| m.predicted).or_else(|| {
                match_level(&spec, cfg.mass, s.two_jz(), state.energy, Some(state.pair_two_k))
            });
            rows.push(SpectrumRow {
                two_jz: s.two_jz(),
                jz: rational(s.two_jz()),
                level_index: i,
                energy: state.energy,
                inferred_two_j: owner.and_then(|m| m.inferred_two_j),
                channel_two_k: state.pair_two_k,
                predicted_energy: matched.map(|p| p.predicted),
                rel_err: matched.map(|p| ((state.energy - p.predicted) / p.predicted).abs()),
            });
        }
    }
    match format {
        Format::Json => ok(json(&rows)),
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.two_jz.to_string(),
                        r.level_index.to_string(),
                        num(r.energy),
                        opt_int(r.inferred_two_j),
                        r.channel_two_k.to_string(),
                        opt_num(r.predicted_energy),
                        opt_num(r.rel_err),
                    ]
                })
                .collect();
            ok(csv(
                &[
                    "two_jz",
                    "level_index",
                    "energy",
                    "inferred_two_j",
                    "channel_two_k",
                    "predicted_energy",
                    "rel_err",
                ],
                &table,
            ))
        }
    }
}

fn sectors_field(m: &Multiplet) -> String {
    m.sectors().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";")
}

fn degeneracy(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    let spec = cfg.spec()?;
    let (_, report) = solve(cfg, &spec)?;
    match format {
        Format::Json => ok(json(&report)),
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .multiplets
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    vec![
                        i.to_string(),
                        num(m.energy),
                        opt_int(m.inferred_two_j),
                        m.inferred_two_j.map(rational).unwrap_or_default(),
                        m.lower_bound.to_string(),
                        m.consistent.to_string(),
                        sectors_field(m),
                        num(m.spread),
                        opt_num(m.predicted.map(|p| p.predicted)),
                        opt_int(m.predicted.map(|p| p.two_j)),
                        opt_int(m.predicted.map(|p| p.two_k)),
                        opt_num(m.predicted.map(|p| p.rel_err)),
                        m.ambiguous.to_string(),
                    ]
                })
                .collect();
            ok(csv(
                &[
                    "multiplet",
                    "energy",
                    "inferred_two_j",
                    "j",
                    "lower_bound",
                    "consistent",
                    "sectors",
                    "spread",
                    "predicted_energy",
                    "predicted_two_j",
                    "pair_two_k",
                    "rel_err",
                    "ambiguous",
                ],
                &rows,
            ))
        }
    }
}

#[derive(Serialize)]
struct ConditionEntry {
    condition: &'static str,
    max_violation: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ResidualEntry {
    pair: Pair,
    spacings: Vec<f64>,
    residuals: Vec<f64>,
    order: f64,
    order_fit_residual: f64,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted_constant: Option<f64>,
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    failures: Vec<String>,
    conditions: Vec<ConditionEntry>,
    commutators: Vec<ResidualEntry>,
}

fn verify(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    // a non-hermitian spec is a verification failure here, not a usage error
    let spec = cfg.spec_unchecked()?;
    let conditions = check_conditions(&spec);
    let grids = cfg.plane_grids()?;
    let reports = commutator_study(
        &Pair::ALL,
        &cfg.coupling(&spec),
        cfg.mass,
        &cfg.packet(),
        &grids,
        &cfg.criteria(),
    )?;
    let mut failures: Vec<String> = Condition::ALL
        .iter()
        .filter(|c| !conditions.get(**c).passed)
        .map(|c| c.name().to_string())
        .collect();
    failures.extend(reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.pair.name().to_string()));
    let report = VerifyReport {
        passed: failures.is_empty(),
        failures,
        conditions: conditions
            .checks
            .iter()
            .map(|c| ConditionEntry {
                condition: c.condition.name(),
                max_violation: c.max_violation,
                passed: c.passed,
            })
            .collect(),
        commutators: reports
            .into_iter()
            .map(|r| ResidualEntry {
                pair: r.pair,
                spacings: r.spacings,
                residuals: r.residuals,
                order: r.order,
                order_fit_residual: r.order_fit_residual,
                verdict: r.verdict,
                fitted_constant: r.fitted_constant,
            })
            .collect(),
    };
    let text = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &report.commutators {
                for (h, res) in r.spacings.iter().zip(&r.residuals) {
                    rows.push(vec![
                        r.pair.name().to_string(),
                        num(*h),
                        num(*res),
                        num(r.order),
                        num(r.order_fit_residual),
                        if r.verdict == Verdict::Pass { "pass" } else { "fail" }.to_string(),
                        opt_num(r.fitted_constant),
                    ]);
                }
            }
            csv(
                &["pair", "spacing", "residual", "order", "order_fit_residual", "verdict", "fitted_constant"],
                &rows,
            )
        }
    };
    Ok(Output {
        text,
        verified: report.passed,
    })
}

#[derive(Serialize)]
struct MultipletLadder {
    multiplet: usize,
    energy: f64,
    inferred_two_j: Option<i32>,
    lower_bound: bool,
    casimir: Option<CasimirReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    casimir_error: Option<String>,
    ladder: Option<LadderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ladder_error: Option<String>,
}

fn ladder(cfg: &RunConfig, format: Format) -> Result<Output, Failure> {
    let spec = cfg.spec()?;
    let (spectra, report) = solve(cfg, &spec)?;
    let grid_cfg = cfg.ladder_grid();
    let mut out = Vec::new();
    for (i, m) in report.multiplets.iter().enumerate() {
        let (casimir, casimir_error) = match casimir_check(m, &spec, cfg.mass) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let lad = ladder_plane(&spectra, m, cfg.mass, &grid_cfg).and_then(|plane| ladder_check(&spectra, &spec, cfg.mass, m, &plane));
        let (ladder, ladder_error) = match lad {
            Ok(l) => (Some(l), None),
            Err(Error::MultipletNotAdjacent) => (None, Some(Error::MultipletNotAdjacent.to_string())),
            Err(e) => return Err(e.into()),
        };
        out.push(MultipletLadder {
            multiplet: i,
            energy: m.energy,
            inferred_two_j: m.inferred_two_j,
            lower_bound: m.lower_bound,
            casimir,
            casimir_error,
            ladder,
            ladder_error,
        });
    }
    match format {
        Format::Json => ok(json(&out)),
        Format::Csv => {
            let mut rows = Vec::new();
            for m in &out {
                let head = vec![
                    m.multiplet.to_string(),
                    num(m.energy),
                    opt_int(m.inferred_two_j),
                    opt_num(m.casimir.map(|c| c.lhs)),
                    opt_num(m.casimir.map(|c| c.rhs)),
                    opt_num(m.casimir.map(|c| c.rel_dev)),
                ];
                let steps = m.ladder.as_ref().map(|l| l.steps.as_slice()).unwrap_or_default();
                if steps.is_empty() {
                    let mut r = head.clone();
                    r.extend(std::iter::repeat_n(String::new(), 7));
                    rows.push(r);
                }
                for s in steps {
                    let mut r = head.clone();
                    r.extend([
                        format!("{:?}", s.kind).to_lowercase(),
                        s.from_two_jz.to_string(),
                        s.level_index.to_string(),
                        s.to_two_jz.to_string(),
                        num(s.norm_ratio),
                        opt_num(s.overlap),
                        opt_num(s.leakage),
                    ]);
                    rows.push(r);
                }
            }
            ok(csv(
                &[
                    "multiplet",
                    "energy",
                    "inferred_two_j",
                    "casimir_lhs",
                    "casimir_rhs",
                    "casimir_rel_dev",
                    "kind",
                    "from_two_jz",
                    "level_index",
                    "to_two_jz",
                    "norm_ratio",
                    "overlap",
                    "leakage",
                ],
                &rows,
            ))
        }
    }
}
