use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use tresca_core::mesh::{read_mesh, write_mesh};
use tresca_core::sensitivity::*;
use tresca_core::solvers::*;
use tresca_core::*;

use crate::args::{EpsArgs, MeshArgs, MeshSource, OrderArg, ProblemArg, SolveArgs, SolverArgs, StudyArgs};
use crate::error::{CliError, CliResult};
use crate::expr::Expr;

fn order(o: OrderArg) -> FeOrder {
    match o {
        OrderArg::P1 => FeOrder::P1,
        OrderArg::P2 => FeOrder::P2,
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn parse_arc(spec: &str) -> CliResult<(AngleRange, BoundaryLabel)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("arc `{spec}` is not LABEL:FROM:TO"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let label = BoundaryLabel::from_code(parts[0].trim()).ok_or_else(bad)?;
    let lo = Expr::parse(parts[1])?.eval(0.0, 0.0, 0.0);
    let hi = Expr::parse(parts[2])?.eval(0.0, 0.0, 0.0);
    Ok((AngleRange::new(lo, hi)?, label))
}

pub fn mesh(a: &MeshArgs) -> CliResult<()> {
    let ranges = if a.arc.is_empty() {
        reference_label_ranges()
    } else {
        a.arc.iter().map(|s| parse_arc(s)).collect::<CliResult<Vec<_>>>()?
    };
    let spec = MeshSpec {
        n_boundary: a.n_boundary,
        order: order(a.order),
        ranges,
    };
    let mesh = spec.build()?;
    write_mesh(&mesh, &a.out)?;
    let s = mesh.stats();
    println!(
        "wrote {}: {} vertices, {} triangles, {} boundary edges, {} dofs (P{}), h_max {:.4e}, min angle {:.2} deg",
        a.out.display(),
        s.n_vertices,
        s.n_triangles,
        s.n_boundary_edges,
        s.n_dofs,
        s.fe_order,
        s.h_max,
        s.min_angle_deg
    );
    for label in BoundaryLabel::ALL {
        if mesh.has_label(label) {
            println!("  {label}: length {:.6}", mesh.label_length(label));
        }
    }
    Ok(())
}

fn load_space(src: &MeshSource) -> CliResult<Arc<FeSpace>> {
    let mesh = match &src.mesh {
        Some(path) => Arc::new(read_mesh(path)?),
        None => reference_mesh_with(src.n_boundary, order(src.order))?,
    };
    Ok(Arc::new(FeSpace::new(mesh)?))
}

fn reference_mesh_with(n: usize, order: FeOrder) -> Result<Arc<Mesh2D>> {
    MeshSpec {
        n_boundary: n,
        order,
        ranges: reference_label_ranges(),
    }
    .build()
}

fn switching_options(s: &SolverArgs) -> CliResult<SwitchingOptions> {
    if !(s.tol > 0.0 && s.cg_tol > 0.0) {
        return Err(CliError::Usage("tolerances must be positive".into()));
    }
    if s.max_iters == 0 {
        return Err(CliError::Usage("--max-iters must be at least 1".into()));
    }
    Ok(SwitchingOptions {
        max_iters: s.max_iters,
        tol: s.tol,
        cg: CgOptions {
            tol: s.cg_tol,
            max_iters: 0,
        },
        ..Default::default()
    })
}

fn tolerances(e: &EpsArgs) -> CliResult<PartitionTolerances> {
    if e.eps_u.is_some_and(|v| !(v > 0.0)) || e.eps_g.is_some_and(|v| !(v > 0.0)) {
        return Err(CliError::Usage("partition tolerances must be positive".into()));
    }
    Ok(PartitionTolerances {
        eps_u: e.eps_u,
        eps_g: e.eps_g,
    })
}

/// Reads `dof tag h` lines and orders them like the friction dofs of `space`.
fn read_partition(path: &Path, space: &FeSpace) -> CliResult<(Vec<RegionTag>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut entries = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(i + 1, format!("expected `dof tag h`, got `{line}`")).into());
        }
        let dof: usize = f[0]
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad dof `{}`", f[0])))?;
        let tag: RegionTag = f[1]
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad tag `{}`", f[1])))?;
        let h: f64 = f[2]
            .parse()
            .map_err(|_| parse_err(i + 1, format!("bad value `{}`", f[2])))?;
        if entries.insert(dof, (tag, h)).is_some() {
            return Err(parse_err(i + 1, format!("dof {dof} listed twice")).into());
        }
    }
    let (dofs, _) = space.label_dofs_with_weights(BoundaryLabel::Tresca)?;
    if entries.len() != dofs.len() {
        return Err(Error::Input(format!(
            "partition lists {} dofs, the mesh has {} friction dofs",
            entries.len(),
            dofs.len()
        ))
        .into());
    }
    dofs.iter()
        .map(|d| {
            entries
                .get(d)
                .copied()
                .ok_or_else(|| Error::Input(format!("friction dof {d} missing from the partition")).into())
        })
        .collect::<CliResult<Vec<_>>>()
        .map(|v| v.into_iter().unzip())
}

fn print_summary(r: &SolveReport) {
    println!("problem = {}", r.kind.name());
    println!("converged = {}", r.converged);
    println!("iterations = {}", r.iterations);
    println!("energy = {:.15e}", r.energy);
    if let Some(res) = &r.residuals {
        println!("max_residual = {:.3e}", res.max());
    }
    if let Some(st) = &r.state {
        println!("final_modes = {}", st.summary());
    }
}

fn finish(r: &SolveReport, a: &SolveArgs) -> CliResult<()> {
    if let Some(p) = &a.report {
        r.write_text(p)?;
    }
    if let Some(p) = &a.field {
        write_field(&r.solution, p)?;
    }
    if r.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{} solve did not converge in {} iterations",
            r.kind.name(),
            r.iterations
        )))
    }
}

pub fn solve(problem: ProblemArg, a: &SolveArgs) -> CliResult<()> {
    let space = load_space(&a.mesh)?;
    let opts = switching_options(&a.solver)?;
    let family = reference_family();
    if a.paper_example && !(a.t >= 0.0) {
        return Err(CliError::Usage("--t must be nonnegative".into()));
    }
    let expr_at = |s: &str| -> CliResult<FieldFn> { Ok(Expr::parse(s)?.at(a.t)) };
    if !a.paper_example && a.t != 0.0 {
        let inputs = [&a.f, &a.k, &a.h, &a.g, &a.g_prime];
        let mut any = false;
        for s in inputs {
            any |= Expr::parse(s)?.uses_t();
        }
        if !any {
            eprintln!("warning: --t = {} has no effect, no expression uses t", a.t);
        }
    }

    let mut report = match problem {
        ProblemArg::Dn => {
            let (f, k, h) = if a.paper_example {
                (family.f(a.t), family.k(a.t), FieldFn::zero())
            } else {
                (expr_at(&a.f)?, expr_at(&a.k)?, expr_at(&a.h)?)
            };
            solve_dirichlet_neumann(&space, &f, &k, &h, opts.cg)?
        }
        ProblemArg::Tresca => {
            let p = if a.paper_example {
                family_problem(&family, a.t, &space)?
            } else {
                let g = Expr::parse(&a.g)?;
                let t = a.t;
                TrescaProblem::new(space.clone(), &expr_at(&a.f)?, &expr_at(&a.k)?, |x, y| g.eval(x, y, t))?
            };
            let mut r = solve_tresca_switching(&p, &opts)?;
            if a.paper_example && a.t == 0.0 {
                let e = space.error_against(r.values(), reference_solution, reference_gradient, &xi_breaklines())?;
                println!("h1_error_vs_exact = {:.6e}", e.h1);
                println!("h1_seminorm_error_vs_exact = {:.6e}", e.h1_semi);
                r.push_param("h1_error_vs_exact", format!("{:.6e}", e.h1));
            }
            if let Some(out) = &a.partition_out {
                let flux = r.flux.as_ref().expect("switching reports carry the flux");
                let part = classify_partition(&r.solution, flux, p.thresholds(), &tolerances(&a.eps)?)?;
                let gp_fn = if a.paper_example {
                    family.g_prime().clone()
                } else {
                    expr_at(&a.g_prime)?
                };
                let gp: Vec<f64> = part
                    .dofs
                    .iter()
                    .map(|&d| {
                        let [x, y] = space.mesh().dof_coords(d);
                        gp_fn.eval(x, y)
                    })
                    .collect();
                let h = derivative_flux_datum(&part, &gp)?;
                write(out, &part.to_text(&h))?;
                println!("partition = {}", part.summary());
            }
            r
        }
        ProblemArg::Signorini => {
            let p = match (&a.partition, a.paper_example) {
                (Some(path), _) => {
                    let (tags, h) = read_partition(path, &space)?;
                    let (f, k) = if a.paper_example {
                        (family.f_prime().clone(), family.k_prime().clone())
                    } else {
                        (expr_at(&a.f)?, expr_at(&a.k)?)
                    };
                    SignoriniProblem::new(space.clone(), &f, &k, tags, h)?
                }
                (None, true) => {
                    let lin = linearize(&family, &space, &opts, &tolerances(&a.eps)?)?;
                    println!("partition = {}", lin.partition.summary());
                    derivative_problem(&space, &lin.partition, &family)?
                }
                (None, false) => {
                    return Err(CliError::Usage(
                        "signorini needs --partition FILE or --paper-example".into(),
                    ))
                }
            };
            let r = solve_signorini_switching(&p, &opts)?;
            println!("feasible = {}", p.is_feasible(r.values()));
            r
        }
    };
    report.push_param("t", a.t);
    print_summary(&report);
    finish(&report, a)
}

fn parse_t_values(s: &str) -> CliResult<Vec<f64>> {
    let ts: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| CliError::Usage(format!("bad t value `{p}`"))))
        .collect::<CliResult<_>>()?;
    if ts.is_empty() {
        return Err(CliError::Usage("the list of t values is empty".into()));
    }
    if ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(CliError::Usage("t values must be positive".into()));
    }
    if ts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage("t values must be strictly descending".into()));
    }
    Ok(ts)
}

fn expression_family(a: &StudyArgs) -> CliResult<PerturbationFamily> {
    let get = |o: &Option<String>, name: &str| -> CliResult<Expr> {
        Expr::parse(
            o.as_deref()
                .ok_or_else(|| CliError::Usage(format!("--{name} is required with --f")))?,
        )
        .map_err(Into::into)
    };
    let (f, k, g) = (get(&a.f, "f")?, get(&a.k, "k")?, get(&a.g, "g")?);
    let (fp, kp, gp) = (
        get(&a.f_prime, "f-prime")?,
        get(&a.k_prime, "k-prime")?,
        get(&a.g_prime, "g-prime")?,
    );
    Ok(PerturbationFamily::new(
        move |t| f.at(t),
        move |t| k.at(t),
        move |t| g.at(t),
        fp.at(0.0),
        kp.at(0.0),
        gp.at(0.0),
    ))
}

pub fn study(a: &StudyArgs) -> CliResult<()> {
    let ts = parse_t_values(&a.t_values)?;
    if !(a.fit_min > 0.0 && a.fit_min < a.fit_max) {
        return Err(CliError::Usage("need 0 < --fit-min < --fit-max".into()));
    }
    let family = if a.f.is_some() {
        expression_family(a)?
    } else {
        reference_family()
    };
    let space = load_space(&a.mesh)?;
    let opts = StudyOptions {
        switching: switching_options(&a.solver)?,
        partition: tolerances(&a.eps)?,
        fit_range: (a.fit_min, a.fit_max),
        ..Default::default()
    };
    let st = convergence_study(&family, &ts, &space, &opts)?;
    write(&a.csv, &st.to_csv())?;
    if let Some(p) = &a.report {
        write(p, &st.to_report())?;
    }
    if let Some(p) = &a.plot {
        write(p, &st.to_plot_data())?;
    }
    if let Some(p) = &a.partition_out {
        let lin = linearize(&family, &space, &opts.switching, &opts.partition)?;
        let gp: Vec<f64> = lin
            .partition
            .dofs
            .iter()
            .map(|&d| {
                let [x, y] = space.mesh().dof_coords(d);
                family.g_prime().eval(x, y)
            })
            .collect();
        write(p, &lin.partition.to_text(&derivative_flux_datum(&lin.partition, &gp)?))?;
    }

    println!("partition = {}", st.partition_summary);
    println!("{:>8} {:>14} {:>14} {:>9}", "t", "err_h1", "err_h1_semi", "converged");
    for r in &st.rows {
        println!(
            "{:>8} {:>14.6e} {:>14.6e} {:>9}{}",
            r.t,
            r.err_h1,
            r.err_h1_semi,
            r.converged,
            if r.floor_regime { "  (floor regime)" } else { "" }
        );
    }
    match st.slope {
        Some(s) => println!("slope = {s:.4} over t in [{}, {}]", a.fit_min, a.fit_max),
        None => println!("slope = nan (fewer than two converged points in the fit range)"),
    }
    println!("wrote {}", a.csv.display());
    if st.all_converged() {
        Ok(())
    } else {
        Err(CliError::NotConverged("some member solves did not converge".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_lists() {
        assert_eq!(parse_t_values("0.6, 0.4,0.1").unwrap(), vec![0.6, 0.4, 0.1]);
        assert!(parse_t_values("").is_err());
        assert!(parse_t_values(" , ").is_err());
        assert!(parse_t_values("0.1,0.2").is_err());
        assert!(parse_t_values("0.1,-0.2").is_err());
        assert!(parse_t_values("abc").is_err());
    }

    #[test]
    fn arcs() {
        let (r, l) = parse_arc("D:pi/4:pi/2").unwrap();
        assert_eq!(l, BoundaryLabel::Dirichlet);
        assert!((r.theta_max - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(parse_arc("Q:0:1").is_err());
        assert!(parse_arc("D:0").is_err());
    }
}
