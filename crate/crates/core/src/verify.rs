//! Quick invariant suite.
//!
//! A handful of small randomized checks over every module. Each check reports
//! its worst observed error against a threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::branching::{all_trivalent_trees, cg_multiplicity, tree_polytope_count};
use crate::config::Tolerances;
use crate::contraction::{contract_closed_form, star_action_with};
use crate::error::Result;
use crate::flow::{integrate_flow, momentum_drift, FlowConfig};
use crate::gt::{
    enumerate_gt, gt_pattern, poisson_bracket_with, random_orbit_point, validate_interlacing, weyl_dim, HighestWeight,
    OrbitFunction,
};
use crate::matrix::{conjugate_diag, eig_hermitian_with, max_norm, random_hermitian, random_sl, Spectrum};
use crate::polygon::{bend_with, build_polygon, diagonal_length, Diagonal};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub worst: f64,
    pub threshold: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.threshold
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<22} worst={:.3e} threshold={:.1e}",
            self.name, self.worst, self.threshold
        )
    }
}

/// Run all checks with `trials` random samples each.
pub fn run_all(seed: u64, trials: usize, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = trials.max(1);
    Ok(vec![
        eig_reconstruction(&mut rng, trials, tol),
        flow_terminal(&mut rng, trials.min(10))?,
        interlacing(&mut rng, trials, tol),
        gt_count(),
        brackets(&mut rng, trials, tol)?,
        star_action(&mut rng, trials, tol)?,
        tree_counts()?,
        bending(&mut rng, trials, tol)?,
    ])
}

fn eig_reconstruction(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> CheckReport {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(1..=6);
        let a = random_hermitian(n, rng);
        let (w, u) = eig_hermitian_with(&a, tol);
        let back = conjugate_diag(&u, w.values());
        worst = worst.max(max_norm(&(back - a.as_mat())) / (1.0 + a.spectral_norm()));
    }
    CheckReport {
        name: "eig-reconstruction",
        worst,
        threshold: tol.eig,
    }
}

fn flow_terminal(rng: &mut ChaCha8Rng, trials: usize) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(2..=4);
        let b0 = random_sl(n, rng);
        let traj = integrate_flow(&b0, &FlowConfig::default())?;
        let expect = contract_closed_form(&b0);
        let scale = b0.frobenius_norm();
        worst = worst.max((traj.terminal.as_mat() - expect.as_mat()).norm() / scale);
        for s in traj.integrated() {
            worst = worst.max(momentum_drift(&b0, &s.b) / (scale * scale));
        }
    }
    Ok(CheckReport {
        name: "flow-terminal",
        worst,
        threshold: 1e-5,
    })
}

fn interlacing(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> CheckReport {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(1..=6);
        let a = random_hermitian(n, rng);
        let p = gt_pattern(&a);
        for v in validate_interlacing(&p, tol.gt_abs(a.spectral_norm())) {
            worst = worst.max(v.deficit);
        }
    }
    CheckReport {
        name: "gt-interlacing",
        worst,
        threshold: 0.0,
    }
}

fn gt_count() -> CheckReport {
    let mut mismatches = 0u32;
    for top in [vec![2, 1, 0], vec![3, 1, 1, 0], vec![4, 2, 0], vec![5, 3, 1, 0]] {
        let lambda = HighestWeight::new(top).expect("dominant");
        if enumerate_gt(&lambda) != weyl_dim(&lambda) {
            mismatches += 1;
        }
    }
    CheckReport {
        name: "gt-count",
        worst: mismatches as f64,
        threshold: 0.0,
    }
}

fn brackets(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for k in 0..trials {
        let n = rng.gen_range(3..=4);
        let lambda = distinct_spectrum(rng, n);
        let a = random_orbit_point(&lambda, rng.gen());
        let j = 1 + k % n;
        let i = rng.gen_range(1..=j);
        let j2 = rng.gen_range(1..=n);
        let i2 = rng.gen_range(1..=j2);
        let f = OrbitFunction::GtMomentum { i, j };
        let g = OrbitFunction::GtMomentum { i: i2, j: j2 };
        worst = worst.max(poisson_bracket_with(&f, &g, &a, tol)?.abs());
    }
    Ok(CheckReport {
        name: "gt-brackets",
        worst,
        threshold: 1e-8,
    })
}

fn star_action(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(3..=4);
        let lambda = distinct_spectrum(rng, n);
        let a = random_orbit_point(&lambda, rng.gen());
        let level = rng.gen_range(1..n);
        let phases: Vec<f64> = (0..level).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let b = star_action_with(&a, level, &phases, tol)?;
        let (pa, pb) = (gt_pattern(&a), gt_pattern(&b));
        for (ra, rb) in pa.rows.iter().zip(&pb.rows) {
            for (x, y) in ra.iter().zip(rb) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(CheckReport {
        name: "star-action",
        worst,
        threshold: 1e-7,
    })
}

fn tree_counts() -> Result<CheckReport> {
    let mut mismatches = 0u32;
    let r = [2u64, 2, 2, 2, 2];
    let trees = all_trivalent_trees(r.len());
    let first = tree_polytope_count(&trees[0], &r)?;
    for t in &trees {
        if tree_polytope_count(t, &r)? != first {
            mismatches += 1;
        }
    }
    let r4 = [1u64, 1, 1, 1];
    for t in all_trivalent_trees(4) {
        if tree_polytope_count(&t, &r4)? != cg_multiplicity(&r4) {
            mismatches += 1;
        }
    }
    Ok(CheckReport {
        name: "tree-counts",
        worst: mismatches as f64,
        threshold: 0.0,
    })
}

fn bending(rng: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> Result<CheckReport> {
    let mut worst = 0.0f64;
    let n = 5;
    let r = vec![1.0; n];
    for _ in 0..trials {
        let d: Vec<f64> = (0..n - 3).map(|_| rng.gen_range(0.6..1.4)).collect();
        let angles: Vec<f64> = (0..n - 3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let p = build_polygon(&r, &d, &angles)?;
        let diag = Diagonal::new(1, 2);
        let q = bend_with(&p, &diag, rng.gen_range(-3.0..3.0), tol)?;
        worst = worst.max(q.closure_residual());
        worst = worst.max((diagonal_length(&q, &diag) - diagonal_length(&p, &diag)).abs());
        for (a, b) in p.side_lengths().iter().zip(q.side_lengths()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(CheckReport {
        name: "polygon-bending",
        worst,
        threshold: 1e-9,
    })
}

fn distinct_spectrum(rng: &mut ChaCha8Rng, n: usize) -> Spectrum {
    let mut x = 0.0;
    let values = (0..n)
        .map(|_| {
            x -= rng.gen_range(0.5..2.0);
            x
        })
        .collect();
    Spectrum::sorted(values)
}
