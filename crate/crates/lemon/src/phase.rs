//! Phase portraits of the billiard map from seeded random initial conditions.
//!
//! Initial conditions are drawn with ChaCha8 (`rand_chacha`) seeded by
//! `seed_from_u64`, which gives the same stream on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::billiard::billiard_step;
use crate::geometry::{AngularState, Arc, Table};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub id: usize,
    /// `(step, phi, theta)` for every visit to the right arc.
    pub samples: Vec<(usize, f64, f64)>,
    /// Why iteration stopped early, if it did.
    pub stopped: Option<String>,
}

pub fn initial_conditions(t: &Table, seed: u64, count: usize) -> Vec<AngularState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = t.corner_angle();
    (0..count)
        .map(|_| {
            let phi = rng.random_range(-c..c);
            let theta = rng.random_range(0.0..PI);
            AngularState::new(Arc::Right, phi, theta)
        })
        .collect()
}

pub fn run_trajectory(t: &Table, id: usize, start: AngularState, iterations: usize) -> Trajectory {
    let mut samples = Vec::new();
    let mut x = start;
    let mut stopped = None;
    if t.is_valid(&x) && x.arc == Arc::Right {
        samples.push((0, x.phi, x.theta));
    }
    for step in 1..=iterations {
        match billiard_step(t, &x) {
            Ok(s) => {
                x = s.to;
                if x.arc == Arc::Right {
                    samples.push((step, x.phi, x.theta));
                }
            }
            Err(e) => {
                stopped = Some(format!("step {step}: {e}"));
                break;
            }
        }
    }
    Trajectory { id, samples, stopped }
}

/// `count` trajectories of `iterations` steps each. The result does not
/// depend on the number of threads.
pub fn phase_portrait(t: &Table, seed: u64, count: usize, iterations: usize) -> Vec<Trajectory> {
    initial_conditions(t, seed, count)
        .into_par_iter()
        .enumerate()
        .map(|(id, x)| run_trajectory(t, id, x, iterations))
        .collect()
}

/// True when every right-arc sample stays within `radius` of one of `centers`
/// in the `(phi, theta)` plane, and the samples visit more than one centre
/// without sitting on them.
pub fn confined_near(traj: &Trajectory, centers: &[(f64, f64)], radius: f64) -> bool {
    if traj.stopped.is_some() || traj.samples.len() < 10 {
        return false;
    }
    let mut visited = vec![false; centers.len()];
    let mut min_dist = f64::INFINITY;
    for &(_, phi, theta) in &traj.samples {
        let nearest = centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, (phi - c.0).hypot(theta - c.1)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, d)) if d <= radius => {
                visited[i] = true;
                min_dist = min_dist.min(d);
            }
            _ => return false,
        }
    }
    visited.iter().filter(|v| **v).count() > 1 && min_dist > 1e-9
}
