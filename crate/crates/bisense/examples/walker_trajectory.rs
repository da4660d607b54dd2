//! Generate the walking-human joint trajectory and dump it as CSV.
//!
//! ```bash
//! cargo run --example walker_trajectory
//! ```

use bisense::geom;
use bisense::kinematics::{
    build_walker, gait_cycle_period, joint_velocities, joints, BodyModel, GaitParams,
};

fn main() -> bisense::Result<()> {
    let body = BodyModel::standard(1.8);
    let gait = GaitParams {
        start: [4.0, 4.0],
        end: [5.0, 4.0],
        duration: 768.0 / 590.0,
        sample_interval: 1.0 / 590.0,
    };
    let traj = build_walker(&body, &gait)?;
    let vels = joint_velocities(&traj)?;

    println!(
        "walker: height {} m, {} samples at {:.3} ms, mean speed {:.3} m/s, gait cycle {:.3} s",
        body.height,
        traj.len(),
        gait.sample_interval * 1e3,
        gait.mean_speed(),
        gait_cycle_period(&body, &gait)
    );

    // Peak speed per joint over the walk.
    println!("{:<14} {:>10} {:>10}", "joint", "max |v|", "min z");
    for j in 0..joints::COUNT {
        let max_v = vels
            .iter()
            .map(|f| geom::norm(f[j]))
            .fold(0.0f64, f64::max);
        let min_z = traj
            .positions
            .iter()
            .map(|f| f[j][2])
            .fold(f64::INFINITY, f64::min);
        println!("{:<14} {:>8.3} m/s {:>8.3} m", joints::NAMES[j], max_v, min_z);
    }

    let out = std::path::Path::new("examples_out/walker_trajectory");
    std::fs::create_dir_all(out)?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    let path = out.join("trajectory.csv");
    std::fs::write(&path, buf)?;
    println!("wrote {}", path.display());
    Ok(())
}
