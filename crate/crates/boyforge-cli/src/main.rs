use boyforge::export::{self, Welding};
use boyforge::{immersion, report, surgery, topology, Error, ImmersedComplex};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Build, check and print the folded-paper Boy surface.
#[derive(Parser)]
#[command(name = "boyforge", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Assemble and write the mesh and its double curve.
    Build {
        assembly: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run every check and print one line per check.
    Verify {
        assembly: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Lay out the printable nets of an assembly.
    Nets {
        assembly: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Read a triangle or polygon mesh and name its surface.
    Classify {
        mesh: PathBuf,
        /// Join vertex records closer than this per coordinate.
        #[arg(long, conflicts_with = "keep_vertices")]
        weld: Option<String>,
        /// Treat every vertex record as its own vertex.
        #[arg(long)]
        keep_vertices: bool,
    },
    /// Remove pieces II and IV and resolve the remaining double arcs.
    Surgery {
        assembly: PathBuf,
        #[arg(long)]
        enumerate_resolutions: bool,
    },
}

/// Failures that end a command, with their exit code.
enum Fail {
    Usage(String),
    Check(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Syntax { .. } | Error::Semantic { .. } | Error::Io(_) => Fail::Usage(e.to_string()),
            _ => Fail::Check(e.to_string()),
        }
    }
}

type Out = Result<bool, Fail>;

fn load(path: &Path) -> Result<(boyforge::AssemblyPlan, Vec<boyforge::Net>), Fail> {
    boyforge::load_assembly(path).map_err(|e| Fail::Usage(e.to_string()))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn build(assembly: &Path, out: &Path) -> Out {
    let (plan, nets) = load(assembly)?;
    let c = boyforge::assemble(&plan, &nets)?;
    std::fs::create_dir_all(out).map_err(|e| Fail::Usage(format!("{}: {e}", out.display())))?;
    let mesh = out.join(format!("{}.obj", plan.name));
    write(&mesh, &export::obj_string(&c))?;
    let l = immersion::self_intersections(&c)?;
    let curve = out.join(format!("{}-double-curve.obj", plan.name));
    write(&curve, &export::double_curve_obj(&l))?;
    println!("{} vertices, {} faces", c.positions.len(), c.faces.len());
    println!("wrote {}", mesh.display());
    println!("wrote {}", curve.display());
    Ok(true)
}

fn verify(assembly: &Path, json: Option<&Path>) -> Out {
    let (plan, nets) = load(assembly)?;
    let r = report::verify(&plan, &nets);
    for c in &r.checks {
        let mark = if c.pass { "PASS" } else { "FAIL" };
        println!("{mark} {}: computed {} expected {}", c.name, c.computed, c.expected);
    }
    println!("verdict: {}", r.verdict);
    if let Some(p) = json {
        write(p, &r.to_json())?;
    }
    Ok(r.passed())
}

fn nets(assembly: &Path, svg: &Path) -> Out {
    let (plan, nets) = load(assembly)?;
    let items = export::print_list(&plan, &nets);
    write(svg, &export::svg_nets(&items))?;
    println!("{} copies written to {}", items.len(), svg.display());
    Ok(true)
}

fn describe(c: &ImmersedComplex) -> Out {
    topology::check_surface(c)?;
    let chi = topology::euler_characteristic(c);
    let orient = if topology::orientable(c) { "orientable" } else { "non-orientable" };
    let name = match topology::classify(c) {
        Ok(k) => k.name(),
        Err(_) => format!("{} components", topology::components(c).len()),
    };
    println!("{name}, χ={chi}, {orient}");
    println!("boundary circles: {}", topology::boundary_components(c)?.count);
    println!("homology: {}", topology::homology(c).integral_text());
    match immersion::self_intersections(c) {
        Ok(l) => {
            let p = immersion::double_curve_profile(&l);
            println!("double arcs: {}, triple points: {}", p.arcs, p.triple_points);
        }
        Err(e) => println!("double curve not computed: {e}"),
    }
    Ok(true)
}

fn classify(mesh: &Path, weld: Option<&str>, keep: bool) -> Out {
    let text = std::fs::read_to_string(mesh).map_err(|e| Fail::Usage(format!("{}: {e}", mesh.display())))?;
    let mode = match (weld, keep) {
        (Some(t), _) => match boyforge::geom::parse_rat(t) {
            Some(r) if r >= boyforge::geom::rat(0) => Welding::Tolerance(r),
            _ => return Err(Fail::Usage(format!("bad weld tolerance {t}"))),
        },
        (None, true) => Welding::Keep,
        (None, false) => Welding::Exact,
    };
    let c = export::parse_obj(&text, &mode)?;
    describe(&c)
}

fn run_surgery(assembly: &Path, all: bool) -> Out {
    let (plan, nets) = load(assembly)?;
    let c = boyforge::assemble(&plan, &nets)?;
    let r = surgery::remove_pieces(&c, &["II", "IV"])?;
    let mut fam: Vec<&str> = (0..r.faces.len()).map(|f| r.provenance(f)).collect();
    fam.dedup();
    println!("remainder: {} faces from {}", r.faces.len(), fam.join(", "));
    let l = immersion::self_intersections(&r)?;
    println!("double arcs in the remainder: {}", l.arcs.len());
    let outcomes = surgery::enumerate_resolutions(&r)?;
    let mut hit = false;
    for o in &outcomes {
        match &o.report {
            Ok(m) => {
                hit |= m.matches_claim;
                if all || m.matches_claim {
                    println!(
                        "resolution [{}]: {}, χ={}, {} boundary circles, {}, homology {}",
                        o.resolution,
                        m.class_name,
                        m.euler,
                        m.boundary_components,
                        if m.orientable { "orientable" } else { "non-orientable" },
                        m.homology
                    );
                }
            }
            Err(e) => {
                if all {
                    println!("resolution [{}]: {e}", o.resolution);
                }
            }
        }
    }
    println!(
        "{} of {} resolutions are connected, non-orientable, with three boundary circles",
        outcomes.iter().filter(|o| o.report.as_ref().is_ok_and(|m| m.matches_claim)).count(),
        outcomes.len()
    );
    Ok(hit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Build { assembly, out } => build(assembly, out),
        Cmd::Verify { assembly, report } => verify(assembly, report.as_deref()),
        Cmd::Nets { assembly, svg } => nets(assembly, svg),
        Cmd::Classify { mesh, weld, keep_vertices } => classify(mesh, weld.as_deref(), *keep_vertices),
        Cmd::Surgery { assembly, enumerate_resolutions } => run_surgery(assembly, *enumerate_resolutions),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Check(m)) => {
            eprintln!("boyforge: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("boyforge: {m}");
            ExitCode::from(2)
        }
    }
}
