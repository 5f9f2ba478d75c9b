use std::collections::BTreeMap;
use std::fmt::Display;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CatalogueEntry, Check, ExperimentConfig, ExperimentError, Params, Table, Tolerances};
use crate::contour::{self, Contour, WindingOptions};
use crate::counterexample::{build_bundle, verify_bundle, OneZeroBundle, OneZeroSpec};
use crate::corpus;
use crate::diffops::{self, AsymptoticOptions, SampleRegion};
use crate::expr::{evaluate, Expr, PointKind, PoleZeroRegistry};
use crate::nevanlinna::{self, RadiusRule};
use crate::sampling::{self, GridSpec};
use crate::wiman;

pub(crate) static CATALOGUE: &[CatalogueEntry] = &[
    CatalogueEntry {
        id: "diff-oracle",
        description: "Δⁿf from the difference recurrence agrees with the binomial sum",
        run: diff_oracle,
    },
    CatalogueEntry {
        id: "commutation",
        description: "(Δⁿf)′ = Δⁿ(f′) over the corpus",
        run: commutation,
    },
    CatalogueEntry {
        id: "argument-principle",
        description: "winding counts equal zeros minus poles for random rational functions",
        run: argument_principle,
    },
    CatalogueEntry {
        id: "thm-onezero",
        description: "meromorphic f with T(r,f) = O(r) whose difference g = Δf has exactly one zero",
        run: thm_onezero,
    },
    CatalogueEntry {
        id: "keldysh",
        description: "m(r,f) + m(r,g) tends to 0 for the one-zero pair",
        run: keldysh,
    },
    CatalogueEntry {
        id: "lem-asymptotics",
        description: "Δⁿf(z) ∼ f⁽ⁿ⁾(z) outside an ε-set for entire f of order below 1",
        run: lem_asymptotics,
    },
    CatalogueEntry {
        id: "wiman-valiron",
        description: "f⁽ⁿ⁾(z)/f(z) ∼ (N(r)/z)ⁿ at points of maximum modulus",
        run: wiman_valiron,
    },
    CatalogueEntry {
        id: "lem-miles-rossi",
        description: "|zf′/f| > γ n(r, 1/f) on a set of angles of definite measure",
        run: lem_miles_rossi,
    },
    CatalogueEntry {
        id: "thm-lesshalf",
        description: "Δⁿf/f has infinitely many zeros for entire f of order below min(1/n, 1/2)",
        run: thm_lesshalf,
    },
    CatalogueEntry {
        id: "lem-arc",
        description: "longest arc with |H| > 1; minimum modulus above 1 on many circles for order below 1/2",
        run: lem_arc,
    },
    CatalogueEntry {
        id: "thm-thm3",
        description: "for T(r,f) = O(log r)², Δf or Δf/f has infinitely many zeros",
        run: thm_thm3,
    },
    CatalogueEntry {
        id: "lem-notrational",
        description: "Δf and Δf/f of a transcendental f are transcendental",
        run: lem_notrational,
    },
];

pub(crate) struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    function: Option<Expr>,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(cfg: &'a ExperimentConfig) -> Result<Self, ExperimentError> {
        let function = match &cfg.function {
            Some(entry) => Some(entry.build().map_err(ExperimentError::Config)?),
            None => None,
        };
        if let Some(g) = &cfg.grid {
            if g.points == 0 || !(g.min > 0.0) || g.max < g.min {
                return Err(ExperimentError::Config(format!("bad grid {g:?}")));
            }
        }
        Ok(Ctx { cfg, function })
    }

    fn p(&self) -> &Params {
        &self.cfg.params
    }

    fn t(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    fn bits(&self, default: usize) -> usize {
        self.cfg.precision_bits.unwrap_or(default)
    }

    /// 256 bits for the one-zero construction, doubles elsewhere.
    pub(crate) fn default_bits(&self) -> usize {
        match self.cfg.experiment.as_str() {
            "thm-onezero" | "keldysh" => self.bits(256),
            _ => self.bits(53),
        }
    }

    fn function_or(&self, default: impl FnOnce() -> Expr) -> Expr {
        self.function.clone().unwrap_or_else(default)
    }

    fn grid_or(&self, min: f64, max: f64, points: usize) -> Vec<f64> {
        self.cfg
            .grid
            .unwrap_or_else(|| GridSpec::geometric(min, max, points))
            .radii()
    }
}

#[derive(Default)]
pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub measured: BTreeMap<String, serde_json::Value>,
    pub tables: BTreeMap<String, Table>,
    pub grid: Option<Vec<f64>>,
}

type CheckResult = Result<(bool, String, Option<f64>), String>;

impl Outcome {
    fn check(&mut self, name: &str, res: CheckResult) {
        let c = match res {
            Ok((passed, detail, value)) => Check {
                name: name.to_string(),
                passed,
                detail,
                value,
            },
            Err(e) => Check {
                name: name.to_string(),
                passed: false,
                detail: format!("error: {e}"),
                value: None,
            },
        };
        self.checks.push(c);
    }

    fn measure(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(serde_json::Value::Null);
        self.measured.insert(key.to_string(), v);
    }

    fn table(&mut self, key: &str, t: Table) {
        self.tables.insert(key.to_string(), t);
    }
}

fn err(e: impl Display) -> String {
    e.to_string()
}

fn strictly_increasing<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// Points of `poles` shifted by `0, −1, …, −n`.
fn shifted_poles(f: &Expr, n: u32) -> Vec<Complex64> {
    let base: Vec<Complex64> = f.registry().poles().map(|p| p.location).collect();
    (0..=n)
        .flat_map(|j| base.iter().map(move |p| p - j as f64))
        .collect()
}

fn diff_oracle(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let corpus = match &ctx.function {
        Some(f) => vec![("configured".to_string(), f.clone())],
        None => corpus::standard_corpus(),
    };
    let orders = ctx.p().orders.clone().unwrap_or(vec![1, 2, 3, 4]);
    let cases = ctx.p().cases.unwrap_or(1000);
    let tol = ctx.t().relative.unwrap_or(1e-10);
    let res = (|| -> CheckResult {
        let diffs: Vec<Vec<Expr>> = corpus
            .iter()
            .map(|(_, f)| {
                orders
                    .iter()
                    .map(|&n| diffops::forward_difference(f, n).map(|d| d.expr))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let max_n = orders.iter().cloned().max().unwrap_or(0);
        let poles: Vec<Vec<Complex64>> = corpus.iter().map(|(_, f)| shifted_poles(f, max_n)).collect();
        let mut rng = sampling::rng(ctx.seed());
        let mut picks = Vec::with_capacity(cases);
        while picks.len() < cases {
            let i = rng.gen_range(0..corpus.len());
            let k = rng.gen_range(0..orders.len());
            let z = sampling::point_in_disc(&mut rng, 8.0);
            if poles[i].iter().all(|p| (z - p).norm() > 0.05) {
                picks.push((i, k, z));
            }
        }
        let errs: Vec<f64> = picks
            .par_iter()
            .map(|&(i, k, z)| {
                let a = evaluate(&diffs[i][k], z)?;
                let b = diffops::binomial_difference_eval(&corpus[i].1, orders[k], z)?;
                Ok(sampling::rel_distance(a, b))
            })
            .collect::<Result<_, crate::ExprError>>()
            .map_err(err)?;
        let mut table = super::Table::new(&["case", "n", "rel_err"]);
        let mut per_fn: BTreeMap<String, f64> = BTreeMap::new();
        for (j, (&(i, k, _), &e)) in picks.iter().zip(&errs).enumerate() {
            table.push(vec![j as f64, orders[k] as f64, e]);
            let slot = per_fn.entry(corpus[i].0.clone()).or_insert(0.0);
            *slot = slot.max(e);
        }
        let worst = errs.iter().cloned().fold(0.0, f64::max);
        out.table("errors", table);
        out.measure("max_rel_err_by_function", per_fn);
        out.measure("cases", cases);
        Ok((worst <= tol, format!("max relative difference {worst:e} over {cases} cases (tolerance {tol:e})"), Some(worst)))
    })();
    out.check("recurrence-vs-binomial", res);
    out
}

fn commutation(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let corpus = match &ctx.function {
        Some(f) => vec![("configured".to_string(), f.clone())],
        None => corpus::standard_corpus(),
    };
    let orders = ctx.p().orders.clone().unwrap_or(vec![1, 2, 3]);
    let samples = ctx.p().samples.unwrap_or(40);
    let tol = ctx.t().relative.unwrap_or(1e-10);
    let region = SampleRegion {
        radius: 8.0,
        ..Default::default()
    };
    let jobs: Vec<(usize, u32)> = (0..corpus.len()).flat_map(|i| orders.iter().map(move |&n| (i, n))).collect();
    let res = (|| -> CheckResult {
        let reps: Vec<f64> = jobs
            .par_iter()
            .map(|&(i, n)| {
                let seed = ctx.seed().wrapping_add(1000 * i as u64 + n as u64);
                diffops::check_commutation(&corpus[i].1, n, samples, &region, seed).map(|r| r.max_rel_dev)
            })
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mut table = Table::new(&["function", "n", "max_rel_dev"]);
        let mut per_fn: BTreeMap<String, f64> = BTreeMap::new();
        for (&(i, n), &d) in jobs.iter().zip(&reps) {
            table.push(vec![i as f64, n as f64, d]);
            let slot = per_fn.entry(corpus[i].0.clone()).or_insert(0.0);
            *slot = slot.max(d);
        }
        let worst = reps.iter().cloned().fold(0.0, f64::max);
        out.table("deviation", table);
        out.measure("max_rel_dev_by_function", per_fn);
        Ok((worst <= tol, format!("max relative deviation {worst:e} (tolerance {tol:e})"), Some(worst)))
    })();
    out.check("commutation", res);
    out
}

fn argument_principle(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let cases = ctx.p().cases.unwrap_or(200);
    let mut rng = sampling::rng(ctx.seed());
    let mut jobs = Vec::with_capacity(cases);
    for i in 0..cases {
        let case = corpus::random_rational(&mut rng, 6, 4, 3.0, 0.25);
        let contour = loop {
            let c = if i % 2 == 0 {
                let center = sampling::point_in_disc(&mut rng, 1.0);
                Contour::circle(center, rng.gen_range(0.5..4.5))
            } else {
                let lo = Complex64::new(rng.gen_range(-4.0..0.0), rng.gen_range(-4.0..0.0));
                let hi = Complex64::new(rng.gen_range(0.2..4.0), rng.gen_range(0.2..4.0));
                Contour::rect(lo, hi)
            }
            .expect("valid contour");
            let margin = 0.02 * c.scale();
            if case.zeros.iter().chain(&case.poles).all(|p| c.distance(*p) > margin) {
                break c;
            }
        };
        let inside = |pts: &[Complex64]| pts.iter().filter(|p| contour.encloses(**p)).count() as i64;
        let expected = inside(&case.zeros) - inside(&case.poles);
        jobs.push((case, contour, expected));
    }
    let res = (|| -> CheckResult {
        let measured: Vec<i64> = jobs
            .par_iter()
            .map(|(case, c, _)| contour::winding_count(&case.expr, c).map(|r| r.net))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mut table = Table::new(&["case", "expected", "measured"]);
        let mut failures = 0;
        for (i, ((_, _, e), m)) in jobs.iter().zip(&measured).enumerate() {
            table.push(vec![i as f64, *e as f64, *m as f64]);
            if e != m {
                failures += 1;
            }
        }
        out.table("counts", table);
        out.measure("failures", failures);
        Ok((failures == 0, format!("{failures} mismatches over {cases} contours"), Some(failures as f64)))
    })();
    out.check("winding-vs-registry", res);
    out
}

fn one_zero_spec(ctx: &Ctx) -> Result<OneZeroSpec, String> {
    let n_seq = ctx.p().n_seq.clone().unwrap_or(vec![2, 10, 60]);
    OneZeroSpec::new(n_seq, ctx.p().ratio_floor.unwrap_or(4.0)).map_err(err)
}

fn thm_onezero(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let bits = ctx.bits(256);
    let samples = ctx.p().samples.unwrap_or(100);
    let bundle = one_zero_spec(ctx).and_then(|s| build_bundle(&s, bits).map_err(err));
    let b = match bundle {
        Ok(b) => b,
        Err(e) => {
            for name in ["identities", "residue-decay", "growth-predicates"] {
                out.check(name, Err(e.clone()));
            }
            return out;
        }
    };
    out.measure("bundle", b.export());
    out.measure("precision_bits", bits);
    let res = verify_bundle(&b, samples, ctx.seed(), bits).map_err(err).map(|rep| {
        let detail = format!(
            "telescoping {:e}, rational {:e}, winding {} (expected {}), zeros in disk {}, symmetry {:e}",
            rep.telescoping.max_rel_err,
            rep.rational_identity.max_rel_err,
            rep.winding_net,
            rep.winding_expected,
            rep.zeros_in_disk,
            rep.symmetry.max_rel_err
        );
        let passed = rep.passed;
        out.measure("verification", &rep);
        (passed, detail, Some(rep.zeros_in_disk as f64))
    });
    out.check("identities", res);

    let weighted = b.weighted_residues();
    let decay = b.residue_decay();
    let floor = b.spec.ratio_floor;
    out.measure("weighted_residues", &weighted);
    out.measure("residue_decay", &decay);
    let worst = decay.iter().cloned().fold(0.0, f64::max);
    out.check(
        "residue-decay",
        Ok((
            decay.iter().all(|&d| d <= 1.0 / floor),
            format!("largest ratio of consecutive n_k|c_k| is {worst:e}, limit 1/{floor}"),
            Some(worst),
        )),
    );

    let res = growth_predicates(ctx, &b, &mut out);
    out.check("growth-predicates", res);
    out
}

fn growth_predicates(ctx: &Ctx, b: &OneZeroBundle, out: &mut Outcome) -> CheckResult {
    let n1 = b.spec.n_seq[0] as f64;
    let nk = *b.spec.n_seq.last().expect("nonempty") as f64;
    let floor = b.spec.ratio_floor;
    let bound = ctx.t().ratio.unwrap_or(4.0 * floor / (floor - 1.0));
    let reg = &b.pole_lattice;
    let moduli: Vec<f64> = reg.poles().map(|p| p.location.norm()).collect();
    let radii = ctx.grid_or(n1, 4.0 * nk, 30);
    let rows: Vec<(f64, f64, f64)> = radii
        .par_iter()
        .map(|&r| {
            let r = nevanlinna::admissible_radius(r, &moduli)?;
            let t = nevanlinna::proximity(&b.f, r)? + nevanlinna::counting_integrated(reg, r, PointKind::Pole)?;
            Ok((r, t / r, reg.count_in_disk(PointKind::Pole, r) as f64 / r))
        })
        .collect::<Result<_, nevanlinna::NevanlinnaError>>()
        .map_err(err)?;
    let mut table = Table::new(&["r", "T_over_r", "n_over_r"]);
    for &(r, t, n) in &rows {
        table.push(vec![r, t, n]);
    }
    out.table("growth", table);
    out.grid = Some(rows.iter().map(|x| x.0).collect());
    let ts: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let t_max = ts.iter().cloned().fold(0.0, f64::max);
    let t_med = sampling::median(&ts).unwrap_or(f64::NAN);
    let n_max = rows.iter().map(|x| x.2).fold(0.0, f64::max);
    out.measure("T_over_r_max", t_max);
    out.measure("T_over_r_median", t_med);
    out.measure("n_over_r_max", n_max);
    Ok((
        t_max < 2.0 * t_med && n_max <= bound,
        format!("max T/r {t_max:.4} vs median {t_med:.4}; max n(r)/r {n_max:.4} (bound {bound:.4})"),
        Some(t_max / t_med),
    ))
}

fn keldysh(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let final_tol = ctx.t().final_value.unwrap_or(0.5);
    let res = (|| -> CheckResult {
        let spec = one_zero_spec(ctx)?;
        let b = build_bundle(&spec, ctx.bits(256)).map_err(err)?;
        let radii = ctx.grid_or(spec.n_seq[0] as f64, 1000.0, 30);
        let rep = nevanlinna::keldysh_check(&b.f, &b.g, &radii).map_err(err)?;
        let mut table = Table::new(&["r", "m_f_plus_m_g"]);
        for (r, s) in rep.radii.iter().zip(&rep.sums) {
            table.push(vec![*r, *s]);
        }
        out.table("keldysh", table);
        out.grid = Some(rep.radii.clone());
        let passed = rep.top_median < rep.bottom_median && rep.final_value < final_tol;
        let detail = format!(
            "decile medians bottom {:.4e}, top {:.4e}; final {:.4e} (limit {final_tol})",
            rep.bottom_median, rep.top_median, rep.final_value
        );
        out.measure("keldysh", &rep);
        Ok((passed, detail, Some(rep.final_value)))
    })();
    out.check("keldysh-smallness", res);
    out
}

/// Registry of the zeros of `f, f′, …, f⁽ⁿ⁾` for a real-rooted product.
fn derivative_zero_registry(f: &Expr, n: u32) -> Result<PoleZeroRegistry, String> {
    let mut pts: Vec<Complex64> = f.registry().zeros().map(|e| e.location).collect();
    for j in 1..=n {
        let zs = corpus::interlaced_derivative_zeros(f, j).map_err(err)?;
        pts.extend(zs.into_iter().map(|x| Complex64::new(x, 0.0)));
    }
    Ok(PoleZeroRegistry::from_points(&pts, &[], true, true))
}

fn lem_asymptotics(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::cube_product(200));
    let radii = ctx.grid_or(10.0, 2000.0, 30);
    let orders = ctx.p().orders.clone().unwrap_or(vec![1, 2]);
    let c_max = ctx.p().c_max.unwrap_or(1.0);
    let h = ctx.p().h.unwrap_or(10.0);
    let tol = ctx.t().top_decile.unwrap_or(0.05);
    let opts = AsymptoticOptions {
        order_estimate: ctx.p().order,
        ..Default::default()
    };
    out.grid = Some(radii.clone());
    let res = (|| -> CheckResult {
        let mut passed = true;
        let mut details = Vec::new();
        let mut worst_top: f64 = 0.0;
        for &n in &orders {
            let reg = derivative_zero_registry(&f, n)?;
            let eps = nevanlinna::build_epsilon_set(&reg, RadiusRule::Exclusion, h).map_err(err)?;
            let rep = diffops::asymptotic_difference_check(&f, n, c_max, &radii, &eps, &opts).map_err(err)?;
            let mut table = Table::new(&["r", "max_dev", "excluded_fraction"]);
            for rec in &rep.records {
                if let Some(d) = rec.max_dev {
                    table.push(vec![rec.r, d, rec.excluded_fraction]);
                }
            }
            out.table(&format!("deviation-n{n}"), table);
            let (bottom, top) = rep
                .decile_medians()
                .ok_or_else(|| format!("n = {n}: every radius excluded"))?;
            out.measure(&format!("n{n}_decile_medians"), (bottom, top));
            out.measure(&format!("n{n}_epsilon_relative_sum"), eps.relative_sum());
            out.measure(&format!("n{n}_order_estimate"), rep.order_estimate);
            out.measure(&format!("n{n}_fully_excluded_radii"), rep.all_excluded());
            passed &= top < tol && top < bottom;
            worst_top = worst_top.max(top);
            details.push(format!("n = {n}: top {top:.4e}, bottom {bottom:.4e}"));
        }
        Ok((passed, format!("{} (limit {tol})", details.join("; ")), Some(worst_top)))
    })();
    out.check("off-epsilon-deviation", res);
    out
}

fn wiman_valiron(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::cube_product(1000));
    let radii = ctx.grid_or(1e2, 1e6, 20);
    let orders = ctx.p().orders.clone().unwrap_or(vec![1, 2]);
    let tol = ctx.t().top_decile.unwrap_or(0.15);
    let (lo, hi) = ctx.t().order_range.unwrap_or((0.25, 0.45));
    let window = ctx.p().max_window.unwrap_or(1 << 14);
    out.grid = Some(radii.clone());
    let res = (|| -> CheckResult {
        let profile = wiman::central_index_profile(&f, &radii, window).map_err(err)?;
        let order = wiman::central_index_order(&profile).map_err(err)?;
        let mut cols = vec!["r".to_string(), "log_mu".to_string(), "N".to_string()];
        cols.extend(orders.iter().map(|n| format!("dev_n{n}")));
        let mut table = Table {
            columns: cols,
            rows: Vec::new(),
        };
        let mut devs: Vec<Vec<f64>> = vec![Vec::new(); orders.len()];
        for (i, &r) in profile.r_grid.iter().enumerate() {
            let big_n = profile.n_vals[i];
            let mut row = vec![r, profile.log_mu[i], big_n as f64];
            for (k, &n) in orders.iter().enumerate() {
                let rec = wiman::wv_ratio_with_index(&f, n, r, big_n).map_err(err)?;
                devs[k].push(rec.deviation);
                row.push(rec.deviation);
            }
            table.push(row);
        }
        out.table("wiman", table);
        let mut passed = (lo..=hi).contains(&order);
        let mut details = vec![format!("central-index order {order:.4} (range [{lo}, {hi}])")];
        let mut worst_top: f64 = 0.0;
        for (k, &n) in orders.iter().enumerate() {
            let (bottom, top) = sampling::decile_medians(&devs[k]).ok_or("empty grid")?;
            out.measure(&format!("n{n}_decile_medians"), (bottom, top));
            passed &= top < tol && top < bottom;
            worst_top = worst_top.max(top);
            details.push(format!("n = {n}: top {top:.4e}, bottom {bottom:.4e}"));
        }
        out.measure("central_index_order", order);
        out.measure("central_index_monotone", profile.is_monotone());
        Ok((passed, format!("{} (limit {tol})", details.join("; ")), Some(worst_top)))
    })();
    out.check("wv-asymptotics", res);
    out
}

fn lem_miles_rossi(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::cube_product(1000));
    let radii = ctx.grid_or(10.0, 1e5, 20);
    let gamma = ctx.p().gamma.unwrap_or(0.5);
    let big_m = ctx.p().big_m.unwrap_or(4.5);
    let rho = ctx.p().rho.unwrap_or(1.0 / 3.0);
    let slack = ctx.t().slack.unwrap_or(0.1);
    out.grid = Some(radii.clone());
    let res = (|| -> CheckResult {
        let bound = nevanlinna::miles_rossi_bound(gamma, big_m, rho);
        let recs: Vec<nevanlinna::MilesRossi> = radii
            .iter()
            .map(|&r| nevanlinna::miles_rossi_measure(&f, r, gamma))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mut table = Table::new(&["r", "measure", "bound", "zero_count"]);
        for m in &recs {
            table.push(vec![m.r, m.measure, bound, m.zero_count as f64]);
        }
        out.table("miles-rossi", table);
        let hits = recs.iter().filter(|m| m.measure > bound).count();
        let frac = hits as f64 / recs.len() as f64;
        let need = 1.0 - 3.0 / big_m - slack;
        out.measure("bound", bound);
        out.measure("fraction", frac);
        Ok((
            frac >= need,
            format!("measure above {bound:.4e} on {hits}/{} radii; need fraction {need:.4}", recs.len()),
            Some(frac),
        ))
    })();
    out.check("miles-rossi-fraction", res);
    out
}

/// Zero counts of `q` in discs of the given radii, each moved off the
/// moduli of `poles`; returns `(radius used, count)`.
fn zero_counts(q: &Expr, poles: &[(Complex64, u32)], radii: &[f64]) -> Result<Vec<(f64, i64)>, String> {
    let moduli: Vec<f64> = poles.iter().map(|p| p.0.norm()).collect();
    radii
        .iter()
        .map(|&r| {
            let r = nevanlinna::admissible_radius(r, &moduli).map_err(err)?;
            let c = contour::count_zeros_in_disk_with_poles(q, r, poles, &WindingOptions::default()).map_err(err)?;
            Ok((r, c))
        })
        .collect()
}

fn thm_lesshalf(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::cube_product(200));
    let radii = ctx.p().radii.clone().unwrap_or(vec![10.0, 100.0, 1000.0]);
    let n = ctx.p().orders.as_ref().and_then(|o| o.first().cloned()).unwrap_or(1);
    let res = (|| -> CheckResult {
        let q = diffops::divided_difference(&f, n).map_err(err)?;
        let reg = f.registry();
        if !reg.zeros_complete() || reg.poles().next().is_some() {
            return Err("needs an entire function with known zeros".into());
        }
        let poles: Vec<(Complex64, u32)> = reg.zeros().map(|e| (e.location, e.multiplicity)).collect();
        let counts = zero_counts(&q, &poles, &radii)?;
        let mut table = Table::new(&["R", "zero_count"]);
        for &(r, c) in &counts {
            table.push(vec![r, c as f64]);
        }
        out.table("zero-counts", table);
        out.grid = Some(counts.iter().map(|c| c.0).collect());
        let cs: Vec<i64> = counts.iter().map(|c| c.1).collect();
        out.measure("zero_counts", &cs);
        Ok((strictly_increasing(&cs), format!("zero counts {cs:?}"), cs.last().map(|&c| c as f64)))
    })();
    out.check("zero-counts-increasing", res);
    out
}

fn lem_arc(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let h = ctx.function_or(|| corpus::cube_product(1000));
    let radii = ctx.grid_or(10.0, 1e5, 20);
    let tau = ctx.p().tau.unwrap_or(0.5);
    let need = ctx.t().fraction.unwrap_or(0.1);
    out.grid = Some(radii.clone());
    let res = (|| -> CheckResult {
        let moduli: Vec<f64> = h.registry().zeros().map(|e| e.location.norm()).collect();
        let recs: Vec<nevanlinna::ArcTheta> = radii
            .iter()
            .map(|&r| {
                let r = nevanlinna::admissible_radius(r, &moduli)?;
                nevanlinna::arc_theta(&h, r)
            })
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let mut table = Table::new(&["r", "theta", "min_modulus_flag", "log_min_modulus"]);
        for a in &recs {
            table.push(vec![a.r, a.theta, a.min_modulus_flag as u8 as f64, a.log_min_modulus]);
        }
        out.table("arc", table);
        let flagged = recs.iter().filter(|a| a.min_modulus_flag).count() as f64 / recs.len() as f64;
        let long = recs
            .iter()
            .filter(|a| a.theta > std::f64::consts::TAU * (1.0 - tau))
            .count() as f64
            / recs.len() as f64;
        out.measure("flagged_fraction", flagged);
        out.measure("long_arc_fraction", long);
        out.measure("tau", tau);
        Ok((
            flagged >= need,
            format!("minimum modulus above 1 on {flagged:.3} of the log-grid (need {need}); θ > 2π(1 − τ) on {long:.3}"),
            Some(flagged),
        ))
    })();
    out.check("min-modulus-regime", res);
    out
}

fn thm_thm3(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::geometric_quotient(40));
    let radii = ctx.p().radii.clone().unwrap_or(vec![10.0, 100.0, 1000.0, 10000.0]);
    let res = (|| -> CheckResult {
        let reg = f.registry();
        if !reg.complete() {
            return Err("needs a function with known zeros and poles".into());
        }
        let g = diffops::forward_difference(&f, 1).map_err(err)?.expr;
        let big_g = diffops::divided_difference(&f, 1).map_err(err)?;
        let f_poles: Vec<(Complex64, u32)> = reg.poles().map(|e| (e.location, e.multiplicity)).collect();
        let f_zeros: Vec<(Complex64, u32)> = reg.zeros().map(|e| (e.location, e.multiplicity)).collect();
        let shifted: Vec<(Complex64, u32)> = f_poles.iter().map(|&(p, m)| (p - 1.0, m)).collect();
        // g = f(z+1) − f(z): poles of f and their shifts by −1
        let g_poles: Vec<_> = f_poles.iter().chain(&shifted).cloned().collect();
        // G = f(z+1)/f(z) − 1: zeros of f and the shifted poles
        let big_g_poles: Vec<_> = f_zeros.iter().chain(&shifted).cloned().collect();
        let mut all = g_poles.clone();
        all.extend(big_g_poles.iter().cloned());
        let moduli: Vec<f64> = all.iter().map(|p| p.0.norm()).collect();
        let used: Vec<f64> = radii
            .iter()
            .map(|&r| nevanlinna::admissible_radius(r, &moduli))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let gc: Vec<i64> = zero_counts(&g, &g_poles, &used)?.into_iter().map(|c| c.1).collect();
        let bc: Vec<i64> = zero_counts(&big_g, &big_g_poles, &used)?.into_iter().map(|c| c.1).collect();
        let mut table = Table::new(&["R", "g_zero_count", "G_zero_count"]);
        for i in 0..used.len() {
            table.push(vec![used[i], gc[i] as f64, bc[i] as f64]);
        }
        out.table("zero-counts", table);
        out.grid = Some(used);
        out.measure("g_zero_counts", &gc);
        out.measure("G_zero_counts", &bc);
        Ok((
            strictly_increasing(&gc) || strictly_increasing(&bc),
            format!("zeros of g {gc:?}; zeros of G {bc:?}"),
            None,
        ))
    })();
    out.check("g-or-G-zeros-unbounded", res);
    out
}

fn lem_notrational(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::default();
    let f = ctx.function_or(|| corpus::cube_product(200));
    let radii = ctx.grid_or(10.0, 1e4, 16);
    let ratio = ctx.t().ratio.unwrap_or(2.0);
    out.grid = Some(radii.clone());
    let res = (|| -> CheckResult {
        let big_g = diffops::divided_difference(&f, 1).map_err(err)?;
        let p = nevanlinna::growth_profile(&big_g, &radii).map_err(err)?;
        let mut table = Table::new(&["r", "T", "T_over_log_r"]);
        let q: Vec<f64> = p.r_grid.iter().zip(&p.t_vals).map(|(r, t)| t / r.ln()).collect();
        for i in 0..q.len() {
            table.push(vec![p.r_grid[i], p.t_vals[i], q[i]]);
        }
        out.table("growth", table);
        let (bottom, top) = sampling::decile_medians(&q).ok_or("empty grid")?;
        out.measure("T_over_log_r_decile_medians", (bottom, top));
        Ok((
            top >= ratio * bottom,
            format!("T(r, Δf/f)/log r decile medians: bottom {bottom:.4}, top {top:.4} (need ratio {ratio})"),
            Some(top / bottom),
        ))
    })();
    out.check("divided-difference-transcendental", res);
    let res = (|| -> CheckResult {
        let g = diffops::forward_difference(&f, 1).map_err(err)?.expr;
        let counts = zero_counts(&g, &[], &[10.0, 100.0, 1000.0])?;
        let cs: Vec<i64> = counts.iter().map(|c| c.1).collect();
        out.measure("difference_zero_counts", &cs);
        Ok((strictly_increasing(&cs), format!("zeros of Δf {cs:?}"), None))
    })();
    out.check("difference-zeros-unbounded", res);
    out
}
