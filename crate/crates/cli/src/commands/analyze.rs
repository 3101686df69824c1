use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::Args;
use frustsim::analysis::{
    count_defects, fit_power_law, fit_pseudo_voigt, order_parameter, pseudospin_field, structure_factor_of, Cut,
    PowerLawFit, StructureFactor, BOOTSTRAP_RESAMPLES, XY3D,
};
use frustsim::lattice::{Lattice, LogicalLattice, ModelKind, Scheme};
use frustsim::quench::SampleSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ensure_dir, write_csv, write_file, RunConfig};
use crate::error::CliError;
use crate::plot::{heatmap, Plot, Series, Style};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    /// Sample files written by `quench`, one per anneal time.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Fit power laws in t_a to every observable.
    #[arg(long)]
    pub fit: bool,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Per-file observables.
#[derive(Debug, Clone)]
pub struct Row {
    pub t_a: f64,
    pub reads: usize,
    pub m: f64,
    pub defect_density: Option<f64>,
    pub xi_x: f64,
    pub xi_y: f64,
}

/// What the lattice's model supports.
struct Kind {
    scheme: Scheme,
    column: &'static str,
    defects: bool,
    logical: bool,
}

fn kind_of(lattice: &Lattice) -> Kind {
    match lattice.model() {
        ModelKind::Triangular => Kind {
            scheme: Scheme::Tri,
            column: "m_tri",
            defects: true,
            logical: true,
        },
        ModelKind::Villain => Kind {
            scheme: Scheme::Vil,
            column: "m_vil",
            defects: false,
            logical: false,
        },
        ModelKind::Custom { .. } => Kind {
            scheme: Scheme::Afm,
            column: "m_afm",
            defects: false,
            logical: false,
        },
    }
}

fn load(path: &Path) -> Result<SampleSet, CliError> {
    let f = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    SampleSet::read_from(BufReader::new(f)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// `1/FWHM` of a pseudo-Voigt fit to the cut; NaN when the cut is too
/// short or has no peak to fit.
fn cut_xi(cut: &Cut) -> f64 {
    let pts: Vec<(f64, f64)> = cut.q.iter().copied().zip(cut.s.iter().copied()).collect();
    fit_pseudo_voigt(&pts).map_or(f64::NAN, |f| f.xi)
}

fn observe(set: &SampleSet, lattice: &Lattice, logical: Option<&LogicalLattice>, kind: &Kind) -> Result<(Row, StructureFactor), CliError> {
    let m = order_parameter(set, lattice, kind.scheme)?.mean;
    let defect_density = match (kind.defects, logical) {
        (true, Some(g)) => {
            let mut total = 0.0;
            for r in set.reads() {
                total += count_defects(&pseudospin_field(r, g)?, g)?.density();
            }
            Some(total / set.len() as f64)
        }
        _ => None,
    };
    let sf = structure_factor_of(set, lattice, if kind.logical { logical } else { None })?;
    let (cx, cy) = sf.peak_cuts();
    let row = Row {
        t_a: set.meta().t_a.unwrap_or(f64::NAN),
        reads: set.len(),
        m,
        defect_density,
        xi_x: cut_xi(&cx),
        xi_y: cut_xi(&cy),
    };
    Ok((row, sf))
}

/// Observable name, its values, and the Kibble-Zurek reference exponent.
fn observables(rows: &[Row], kind: &Kind) -> Vec<(&'static str, Vec<f64>, f64)> {
    let kzm = XY3D.predict();
    let mut v = vec![(kind.column, rows.iter().map(|r| r.m).collect(), kzm.order_parameter)];
    if kind.defects {
        v.push((
            "defect_density",
            rows.iter().map(|r| r.defect_density.unwrap_or(f64::NAN)).collect(),
            kzm.defects,
        ));
    }
    v.push(("xi_x", rows.iter().map(|r| r.xi_x).collect(), kzm.correlation_length));
    v.push(("xi_y", rows.iter().map(|r| r.xi_y).collect(), kzm.correlation_length));
    v
}

fn fmt(v: f64) -> String {
    v.to_string()
}

pub fn run(args: &AnalyzeArgs, out: &Path) -> Result<String, CliError> {
    let sets: Vec<SampleSet> = args.files.iter().map(|p| load(p)).collect::<Result<_, _>>()?;
    let first = sets[0].meta().clone();
    let offenders: Vec<String> = args
        .files
        .iter()
        .zip(&sets)
        .filter(|(_, s)| !s.meta().same_lattice(&first))
        .map(|(p, s)| {
            let m = s.meta();
            format!("{} ({}x{} {} j1={} j2={})", p.display(), m.lx, m.ly, m.topology, m.j1, m.j2)
        })
        .collect();
    if !offenders.is_empty() {
        return Err(CliError::Config(format!(
            "inputs mix lattices; these differ from {} ({}x{} {} j1={} j2={}): {}",
            args.files[0].display(),
            first.lx,
            first.ly,
            first.topology,
            first.j1,
            first.j2,
            offenders.join(", ")
        )));
    }
    if let Some((p, _)) = args.files.iter().zip(&sets).find(|(_, s)| s.meta().t_a.is_none()) {
        return Err(CliError::Config(format!("{} records no anneal time", p.display())));
    }
    if args.fit && sets.len() < 3 {
        return Err(CliError::Config(format!(
            "--fit needs at least 3 anneal times, got {}",
            sets.len()
        )));
    }
    let lattice = first.lattice()?;
    let kind = kind_of(&lattice);
    let logical = if kind.logical || kind.defects {
        Some(LogicalLattice::from_lattice(&lattice)?)
    } else {
        None
    };
    let results: Vec<(Row, StructureFactor)> = sets
        .par_iter()
        .map(|s| observe(s, &lattice, logical.as_ref(), &kind))
        .collect::<Result<_, _>>()?;
    let mut order: Vec<usize> = (0..results.len()).collect();
    order.sort_by(|&a, &b| results[a].0.t_a.total_cmp(&results[b].0.t_a));
    let rows: Vec<Row> = order.iter().map(|&i| results[i].0.clone()).collect();

    ensure_dir(out)?;
    RunConfig::Analyze(args).write(out)?;
    write_csv(&out.join("observables.csv"), |w| {
        let mut header = vec!["t_a", "reads", kind.column];
        if kind.defects {
            header.push("defect_density");
        }
        header.extend(["xi_x", "xi_y"]);
        w.write_record(&header)?;
        for r in &rows {
            let mut rec = vec![fmt(r.t_a), r.reads.to_string(), fmt(r.m)];
            if let Some(d) = r.defect_density {
                rec.push(fmt(d));
            }
            rec.extend([fmt(r.xi_x), fmt(r.xi_y)]);
            w.write_record(&rec)?;
        }
        Ok(())
    })?;

    let t_a: Vec<f64> = rows.iter().map(|r| r.t_a).collect();
    let mut fits: Vec<(&str, Option<PowerLawFit>, f64, usize)> = Vec::new();
    let mut notes = Vec::new();
    if args.fit {
        for (k, (name, values, reference)) in observables(&rows, &kind).into_iter().enumerate() {
            let pts: Vec<(f64, f64)> = t_a
                .iter()
                .zip(&values)
                .filter(|(_, v)| v.is_finite() && **v > 0.0)
                .map(|(t, v)| (*t, *v))
                .collect();
            if pts.len() < 3 {
                notes.push(format!("{name}: only {} positive points, not fitted", pts.len()));
                fits.push((name, None, reference, pts.len()));
                continue;
            }
            let seed = frustsim::rng::derive(args.seed, k as u64);
            fits.push((name, Some(fit_power_law(&pts, BOOTSTRAP_RESAMPLES, seed)?), reference, pts.len()));
        }
        write_csv(&out.join("fits.csv"), |w| {
            w.write_record(["observable", "exponent", "prefactor", "ci_lo", "ci_hi", "n_points", "kzm_reference"])?;
            for (name, fit, reference, n) in &fits {
                if let Some(f) = fit {
                    w.write_record(&[
                        name.to_string(),
                        fmt(f.exponent),
                        fmt(f.prefactor),
                        fmt(f.ci.lo),
                        fmt(f.ci.hi),
                        n.to_string(),
                        fmt(*reference),
                    ])?;
                }
            }
            Ok(())
        })?;
    }

    if args.plot {
        for (name, values, reference) in observables(&rows, &kind) {
            let mut series = vec![Series::new(
                name,
                t_a.iter().copied().zip(values.iter().copied()).collect(),
                Style::Points,
            )];
            if let Some((_, Some(f), _, _)) = fits.iter().find(|f| f.0 == name) {
                let ends = [t_a[0], t_a[t_a.len() - 1]];
                series.push(Series::new(
                    format!("fit t^{:.3}", f.exponent),
                    ends.iter().map(|&t| (t, f.prefactor * t.powf(f.exponent))).collect(),
                    Style::Line,
                ));
                // reference slope through the fit at the geometric mid-point
                let mid = (ends[0] * ends[1]).sqrt();
                let anchor = f.prefactor * mid.powf(f.exponent);
                series.push(Series::new(
                    format!("KZM t^{reference:.3}"),
                    ends.iter().map(|&t| (t, anchor * (t / mid).powf(reference))).collect(),
                    Style::Dashed,
                ));
            }
            let svg = Plot {
                title: format!("{name} vs anneal time"),
                x_label: "t_a".into(),
                y_label: name.into(),
                log_x: true,
                log_y: true,
                series,
            }
            .to_svg();
            write_file(&out.join(format!("{name}.svg")), svg.as_bytes())?;
        }
        for (rank, &i) in order.iter().enumerate() {
            let sf = &results[i].1;
            let (nx, ny) = sf.dims();
            let grid: Vec<f64> = (0..nx).flat_map(|kx| (0..ny).map(move |ky| (kx, ky))).map(|(a, b)| sf.get(a, b)).collect();
            let svg = heatmap(
                &format!("S(q), t_a = {:.4}", rows[rank].t_a),
                "q_x",
                "q_y",
                nx,
                ny,
                &grid,
            );
            write_file(&out.join(format!("structure_factor_{rank:03}.svg")), svg.as_bytes())?;
        }
    }
    let mut msg = format!("analyzed {} sample files into {}", rows.len(), out.display());
    for (name, fit, reference, _) in &fits {
        if let Some(f) = fit {
            msg.push_str(&format!(
                "\n  {name} ~ t_a^{:.3} [{:.3}, {:.3}] (KZM {reference:.3})",
                f.exponent, f.ci.lo, f.ci.hi
            ));
        }
    }
    for n in notes {
        msg.push_str(&format!("\nwarning: {n}"));
    }
    Ok(msg)
}
