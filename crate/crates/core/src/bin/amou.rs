//! Command-line runner: ingest JSON space/element/hom specs, run the
//! verification suites, emit a machine-readable verdict report.
//!
//! Exit codes: 0 all suites passed, 1 at least one failed (the report
//! carries the counterexample), 2 invalid input.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use amou::axioms::{self, AbsModel};
use amou::capmaps::{self, CompressionMap, StarHom};
use amou::ideals::{self, IdealHandle};
use amou::ktheory::{self, OrderProjection};
use amou::oup;
use amou::space::{Element, SpaceSpec};
use amou::{Counterexample, Error, Tolerances, Verdict};

#[derive(Parser)]
#[command(name = "amou", about = "Verification suites for matrix order unit spaces", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Space spec as JSON ({"summands":[..]}) or a path to one.
    #[arg(long, default_value = r#"{"summands":[2,1]}"#)]
    space: String,
    /// RNG seed recorded in every verdict.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per suite.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Amplification levels to exercise.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2])]
    levels: Vec<usize>,
    /// Eigenvalue floor for cone membership.
    #[arg(long = "tol-psd", default_value_t = 1e-9)]
    tol_psd: f64,
    /// Entrywise equality slack.
    #[arg(long = "tol-eq", default_value_t = 1e-8)]
    tol_eq: f64,
    /// Relative singular-value cutoff.
    #[arg(long = "tol-rank", default_value_t = 1e-10)]
    tol_rank: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Absolute-value axiom battery plus corrupted-model controls.
    Axioms(Common),
    /// Order unit property suites; --x runs the deterministic refuter.
    Oup {
        #[command(flatten)]
        common: Common,
        /// Positive unit-norm element as JSON or a path.
        #[arg(long)]
        x: Option<String>,
    },
    /// Hereditary ideal engine for the generator --x.
    Ideal {
        #[command(flatten)]
        common: Common,
        /// Positive unit-norm level-1 generator as JSON or a path.
        #[arg(long)]
        x: String,
    },
    /// Kernel and quotient suites for the *-homomorphism --hom.
    Quotient {
        #[command(flatten)]
        common: Common,
        /// Hom as JSON ({"source":[..],"target":[..],"mult":[[..]]}) or a path.
        #[arg(long)]
        hom: String,
    },
    /// K-theory suites; --proj adds the corner-inclusion checks.
    K0 {
        #[command(flatten)]
        common: Common,
        /// Level-1 order projection as JSON or a path.
        #[arg(long)]
        proj: Option<String>,
    },
    /// Everything, with defaults derived from the space.
    Suite(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_arg(raw: &str) -> Result<serde_json::Value, Error> {
    let text = if std::path::Path::new(raw).exists() {
        std::fs::read_to_string(raw).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        raw.to_string()
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_space(common: &Common) -> Result<SpaceSpec, Error> {
    let value = read_arg(&common.space)?;
    let spec: SpaceSpec =
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    SpaceSpec::new(spec.summands)
}

fn parse_element(space: &SpaceSpec, raw: &str) -> Result<Element, Error> {
    Element::from_json(space, &read_arg(raw)?)
}

fn tolerances(common: &Common) -> Result<Tolerances, Error> {
    let tol = Tolerances {
        psd_tol: common.tol_psd,
        eq_tol: common.tol_eq,
        rank_tol: common.tol_rank,
    };
    tol.validate()?;
    Ok(tol)
}

fn max_dim_cap() -> usize {
    std::env::var("OOL_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(64)
}

fn check_dims(space: &SpaceSpec, levels: &[usize]) -> Result<(), Error> {
    let cap = max_dim_cap();
    let max_level = levels.iter().copied().max().unwrap_or(1).max(1);
    let total = max_level * space.total_dim();
    if total > cap {
        return Err(Error::LevelTooLarge(total, cap));
    }
    Ok(())
}

/// Wrap a control that must fail: the wrapper passes exactly when the
/// control produced its counterexample.
fn expect_failure(name: &str, inner: &[Verdict]) -> Verdict {
    let failed = inner.iter().find(|v| !v.passed);
    match failed {
        Some(v) => {
            let mut wrapped = Verdict::pass(name, v.samples, v.seed);
            wrapped.flags.insert("refuted_suite".into(), v.name.clone().into());
            if let Some(ce) = &v.counterexample {
                wrapped
                    .flags
                    .insert("certificate_inequality".into(), ce.inequality.clone().into());
            }
            wrapped
        }
        None => Verdict::fail(
            name,
            inner.iter().map(|v| v.samples).max().unwrap_or(0),
            inner.first().map(|v| v.seed).unwrap_or(0),
            Counterexample::new("control_was_expected_to_fail", 1.0),
        ),
    }
}

struct Run {
    common: Common,
    space: SpaceSpec,
    tol: Tolerances,
    verdicts: Vec<Verdict>,
    extra: serde_json::Map<String, serde_json::Value>,
}

impl Run {
    fn new(common: Common) -> Result<Run, Error> {
        let space = parse_space(&common)?;
        let tol = tolerances(&common)?;
        check_dims(&space, &common.levels)?;
        Ok(Run {
            common,
            space,
            tol,
            verdicts: Vec::new(),
            extra: serde_json::Map::new(),
        })
    }

    fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    fn extend(&mut self, vs: Vec<Verdict>) {
        self.verdicts.extend(vs);
    }

    fn axioms(&mut self) -> Result<(), Error> {
        let c = &self.common;
        self.verdicts.extend(axioms::check_axioms(
            &self.space,
            AbsModel::Genuine,
            &c.levels,
            c.samples,
            c.seed,
            &self.tol,
        )?);
        let block = axioms::check_block_lemma(&self.space, &c.levels, c.samples, c.seed, &self.tol)?;
        self.verdicts.push(block);
        // Controls: each corrupted model must fail some axiom. The control
        // budget is smaller; one certificate is enough.
        let budget = c.samples.min(100).max(1);
        for (tag, model) in [
            ("control_detects_unit_shift", AbsModel::Shift(1e-3)),
            ("control_detects_norm_shift", AbsModel::NormShift(1e-3)),
            ("control_detects_scaling", AbsModel::Scaled(1.1)),
        ] {
            let inner =
                axioms::check_axioms(&self.space, model, &c.levels, budget, c.seed, &self.tol)?;
            self.verdicts.push(expect_failure(tag, &inner));
        }
        Ok(())
    }

    fn oup(&mut self, x: Option<&str>) -> Result<(), Error> {
        let c = self.common.clone();
        if let Some(raw) = x {
            let x = parse_element(&self.space, raw)?;
            let norm = x.order_unit_norm();
            if (norm - 1.0).abs() > self.tol.eq_tol {
                return Err(Error::NotUnitNorm(norm));
            }
            if !x.is_positive(&self.tol)? {
                return Err(Error::NotPositive);
            }
            match oup::construct_counterexample(&x, &self.tol)? {
                Some((y, eps)) => {
                    let bound = x.scale(y.order_unit_norm());
                    let margin = bound.sub(&y.abs_value(&self.tol)?)?.min_eigenvalue(&self.tol)?;
                    let ce = Counterexample::new("norm_times_x_minus_abs_y_psd", margin)
                        .with_element("x", &x)
                        .with_element("y", &y)
                        .with_value("epsilon", eps.into());
                    self.push(Verdict::fail("absolute_order_unit_property", 1, c.seed, ce));
                }
                None => self.push(Verdict::pass("absolute_order_unit_property", 1, c.seed)),
            }
            for mode in [oup::PropertyMode::Oup, oup::PropertyMode::AbsOup] {
                self.push(oup::refute_property(&x, 1, mode, c.samples, c.seed, &self.tol)?);
            }
            self.push(oup::check_block_characterization(&x, 2, c.samples, c.seed, &self.tol)?);
        }
        for &l in &c.levels {
            let mut v = oup::check_oup_characterization(&self.space, l, c.samples, c.seed, &self.tol)?;
            v.name = format!("{}_level_{l}", v.name);
            self.push(v);
            let mut v = oup::projection_norm_check(&self.space, l, c.samples, c.seed, &self.tol)?;
            v.name = format!("{}_level_{l}", v.name);
            self.push(v);
        }
        Ok(())
    }

    fn ideal(&mut self, x: &str) -> Result<(), Error> {
        let x = parse_element(&self.space, x)?;
        self.ideal_from(x)
    }

    fn ideal_from(&mut self, x: Element) -> Result<(), Error> {
        let c = self.common.clone();
        let handle = IdealHandle::new(x, self.tol)?;
        for &l in &c.levels {
            let mut v = ideals::check_order_ideal(&handle, l, c.samples, c.seed, &self.tol)?;
            v.name = format!("{}_level_{l}", v.name);
            self.push(v);
        }
        self.extend(ideals::check_ideal_theorem(&handle, &c.levels, c.samples, c.seed, &self.tol)?);
        self.push(ideals::check_membership_agreement(
            &self.space,
            c.samples,
            c.seed,
            &self.tol,
        )?);
        if handle.generator_is_projection() {
            self.push(ideals::check_corner_agreement(&handle, c.samples, c.seed, &self.tol)?);
            self.push(ktheory::check_op_in_ideal(&handle, c.samples, c.seed, &self.tol)?);
        }
        self.push(expect_failure(
            "control_detects_non_ideal",
            &[ideals::non_ideal_control_verdict()?],
        ));
        Ok(())
    }

    fn quotient(&mut self, hom: &str) -> Result<(), Error> {
        let hom = StarHom::from_json(&read_arg(hom)?)?;
        self.quotient_from(hom)
    }

    fn quotient_from(&mut self, hom: StarHom) -> Result<(), Error> {
        let c = self.common.clone();
        self.push(capmaps::check_cap(&hom, &c.levels, c.samples, c.seed, &self.tol)?);
        self.extend(capmaps::check_kernel_theorem(&hom, c.samples, c.seed, &self.tol)?);
        if !hom.is_zero_map() {
            let q = capmaps::quotient(&hom)?;
            self.push(capmaps::check_quotient_identification(&q, c.samples, c.seed, &self.tol)?);
        }
        let compression = CompressionMap::new(2)?;
        let inner = capmaps::check_cap(&compression, &c.levels, c.samples.min(100).max(1), c.seed, &self.tol)?;
        self.push(expect_failure("control_detects_compression", &[inner]));
        Ok(())
    }

    fn k0(&mut self, proj: Option<&str>) -> Result<(), Error> {
        let c = self.common.clone();
        let group = ktheory::k0_group(&self.space);
        self.extra.insert(
            "k0_group".into(),
            serde_json::to_value(&group).expect("group presentation serializes"),
        );
        self.push(ktheory::check_k0_laws(&self.space, c.samples, c.seed, &self.tol)?);
        self.push(ktheory::check_t_witness(&self.space, c.samples, c.seed, &self.tol)?);
        let proj = match proj {
            Some(raw) => Some(parse_element(&self.space, raw)?),
            None => None,
        };
        if let Some(p) = proj {
            let p = OrderProjection::new(p, &self.tol)?;
            let inclusion = ktheory::corner_inclusion_hom(&p, &self.tol)?;
            self.extra.insert(
                "corner_space".into(),
                serde_json::to_value(inclusion.corner_space()).expect("space serializes"),
            );
            self.extra
                .insert("inclusion_injective".into(), inclusion.injective.into());
            self.push(ktheory::check_corner_diagram(
                &inclusion, &c.levels, c.samples, c.seed, &self.tol,
            )?);
            let handle = IdealHandle::new(p.element().clone(), self.tol)?;
            self.push(ktheory::check_op_in_ideal(&handle, c.samples, c.seed, &self.tol)?);
            self.push(ktheory::check_equivalence_transfer(&p, c.samples, c.seed, &self.tol)?);
        }
        Ok(())
    }

    /// Default projection for the everything-suite: rank ⌈n/2⌉ diagonal
    /// per summand.
    fn default_projection(&self) -> Element {
        let blocks = self
            .space
            .summands
            .iter()
            .map(|&n| {
                let diag: Vec<f64> = (0..n).map(|i| if i < n.div_ceil(2) { 1.0 } else { 0.0 }).collect();
                amou::ComplexMatrix::diag_real(&diag)
            })
            .collect();
        Element::new(self.space.clone(), (1, 1), blocks).expect("diagonal projection shapes")
    }

    fn suite(&mut self) -> Result<(), Error> {
        self.axioms()?;
        self.oup(None)?;
        let p = self.default_projection();
        self.ideal_from(p.clone())?;
        self.quotient_from(StarHom::identity(&self.space))?;
        let raw = p.to_json().to_string();
        self.k0(Some(raw.as_str()))?;
        Ok(())
    }

    fn finish(mut self) -> Result<ExitCode, Error> {
        self.verdicts.sort_by(|a, b| {
            (a.name.as_str(), serde_json::to_string(&a.flags).unwrap_or_default())
                .cmp(&(b.name.as_str(), serde_json::to_string(&b.flags).unwrap_or_default()))
        });
        let all_passed = self.verdicts.iter().all(|v| v.passed);
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut report = serde_json::Map::new();
        report.insert("timestamp".into(), timestamp.into());
        report.insert(
            "space".into(),
            serde_json::to_value(&self.space).expect("space serializes"),
        );
        report.insert("seed".into(), self.common.seed.into());
        report.insert("samples".into(), self.common.samples.into());
        report.insert(
            "levels".into(),
            serde_json::to_value(&self.common.levels).expect("levels serialize"),
        );
        report.insert(
            "tolerances".into(),
            serde_json::to_value(self.tol).expect("tolerances serialize"),
        );
        for (k, v) in self.extra {
            report.insert(k, v);
        }
        report.insert("passed".into(), all_passed.into());
        report.insert(
            "suites".into(),
            serde_json::to_value(&self.verdicts).expect("verdicts serialize"),
        );
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(report))
            .expect("report serializes");
        match &self.common.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::Parse(e.to_string()))?,
            None => println!("{text}"),
        }
        Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Axioms(common) => {
            let mut run = Run::new(common)?;
            run.axioms()?;
            run.finish()
        }
        Command::Oup { common, x } => {
            let mut run = Run::new(common)?;
            run.oup(x.as_deref())?;
            run.finish()
        }
        Command::Ideal { common, x } => {
            let mut run = Run::new(common)?;
            run.ideal(&x)?;
            run.finish()
        }
        Command::Quotient { common, hom } => {
            let mut run = Run::new(common)?;
            run.quotient(&hom)?;
            run.finish()
        }
        Command::K0 { common, proj } => {
            let mut run = Run::new(common)?;
            run.k0(proj.as_deref())?;
            run.finish()
        }
        Command::Suite(common) => {
            let mut run = Run::new(common)?;
            run.suite()?;
            run.finish()
        }
    }
}
