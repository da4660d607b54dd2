//! Trace the multipath rays of the walking scenario at a few time instants
//! and dump them as CSV.
//!
//! ```bash
//! cargo run --example trace_rays
//! ```

use bisense::channel::{trace_rays, write_rays_csv, Environment};
use bisense::kinematics::{build_walker, BodyModel, GaitParams};

fn main() -> bisense::Result<()> {
    let mut env = Environment::new([19.0, 10.0, 3.0], [4.0, 5.0, 1.5], [6.0, 3.0, 1.5], 60e9);
    env.wall_reflections = true;

    let gait = GaitParams {
        start: [4.0, 4.0],
        end: [5.0, 4.0],
        duration: 1.3,
        sample_interval: 1.3 / 16.0,
    };
    let traj = build_walker(&BodyModel::standard(1.8), &gait)?;

    let mut realizations = Vec::new();
    for &t in &[0.0, 0.65, 1.2] {
        let real = trace_rays(&env, &traj.frame_at(t), t)?;
        println!(
            "t = {t:.2} s: {} rays (LOS + {} joint bounces + {} wall images)",
            real.rays.len(),
            real.rays.iter().filter(|r| r.target_related).count(),
            real.rays
                .iter()
                .filter(|r| !r.target_related && r.n_reflections > 0)
                .count(),
        );
        for ray in real.rays.iter().take(4) {
            println!(
                "  delay {:7.3} ns  gain {:6.1} dB  aod ({:5.1}, {:5.1})  aoa ({:5.1}, {:5.1})  refl {}",
                ray.delay * 1e9,
                20.0 * ray.gain.log10(),
                ray.aod.0,
                ray.aod.1,
                ray.aoa.0,
                ray.aoa.1,
                ray.n_reflections,
            );
        }
        realizations.push(real);
    }

    let out = std::path::Path::new("examples_out/trace_rays");
    std::fs::create_dir_all(out)?;
    let mut buf = Vec::new();
    write_rays_csv(&realizations, &mut buf)?;
    let path = out.join("rays.csv");
    std::fs::write(&path, buf)?;
    println!("wrote {}", path.display());
    Ok(())
}
