//! Exact construction and verification of a polyhedral Boy surface built
//! from folded paper nets.

pub mod assembly;
pub mod complex;
pub mod error;
pub mod export;
pub mod fold;
pub mod geom;
pub mod immersion;
pub mod net;
pub mod poly;
pub mod report;
pub mod surgery;
pub mod topology;

pub use assembly::{assemble, assemble_with, piece_iv, symmetry_check};
pub use complex::ImmersedComplex;
pub use error::{Error, Result};
pub use fold::{fold, solve_placement, Piece};
pub use geom::{Rat, RigidMotion, Rotation, Vec2, Vec3};
pub use net::{parse_assembly, parse_net, parse_nets, AnchorTable, AssemblyPlan, Net};

/// Net text for the three Boy pieces.
pub const BOY_NETS: &str = include_str!("../data/boy.net");
/// Assembly plan for the Boy surface.
pub const BOY_PLAN: &str = include_str!("../data/boy.bsy");

pub fn builtin_boy_nets() -> Vec<Net> {
    parse_nets(BOY_NETS).expect("builtin nets are valid")
}

pub fn builtin_boy_plan() -> AssemblyPlan {
    parse_assembly(BOY_PLAN, &AnchorTable::boy()).expect("builtin plan is valid")
}

/// Assembles the builtin Boy surface.
pub fn build_boy() -> Result<ImmersedComplex> {
    assemble(&builtin_boy_plan(), &builtin_boy_nets())
}

/// Reads an assembly plan and the nets file it names, which is looked up
/// next to the plan. A plan without a `nets` line uses the builtin nets.
pub fn load_assembly(path: &std::path::Path) -> Result<(AssemblyPlan, Vec<Net>)> {
    let read = |p: &std::path::Path| std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())));
    let plan = parse_assembly(&read(path)?, &AnchorTable::boy())?;
    let nets = match &plan.nets_file {
        Some(f) => {
            let p = path.parent().unwrap_or(std::path::Path::new(".")).join(f);
            parse_nets(&read(&p)?)?
        }
        None => builtin_boy_nets(),
    };
    Ok((plan, nets))
}
