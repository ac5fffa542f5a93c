//! Configuration flags shared by every subcommand.
//!
//! Each value comes from its flag, then its `MFLOW_*` environment variable,
//! then the built-in default.

use clap::parser::ValueSource;
use clap::{ArgMatches, Args};
use mflow_core::{FlowConfig, Tolerances};

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Seed for randomized subcommands.
    #[arg(long, env = "MFLOW_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Power of the determinant driving the flow.
    #[arg(long, env = "MFLOW_M", default_value_t = 1, global = true)]
    pub m: u32,
    #[arg(long, env = "MFLOW_TOL_HERMITIAN", default_value_t = 1e-10, global = true)]
    pub tol_hermitian: f64,
    #[arg(long, env = "MFLOW_TOL_UNITARY", default_value_t = 1e-9, global = true)]
    pub tol_unitary: f64,
    #[arg(long, env = "MFLOW_TOL_EIG", default_value_t = 1e-9, global = true)]
    pub tol_eig: f64,
    #[arg(long, env = "MFLOW_TOL_POLAR", default_value_t = 1e-9, global = true)]
    pub tol_polar: f64,
    #[arg(long, env = "MFLOW_TOL_PSD", default_value_t = 1e-10, global = true)]
    pub tol_psd: f64,
    #[arg(long, env = "MFLOW_TOL_CLUSTER", default_value_t = 1e-8, global = true)]
    pub tol_cluster: f64,
    #[arg(long, env = "MFLOW_TOL_GT", default_value_t = 1e-8, global = true)]
    pub tol_gt: f64,
    #[arg(long, env = "MFLOW_TOL_GRAD_FLOOR", default_value_t = 1e-12, global = true)]
    pub tol_grad_floor: f64,
    #[arg(long, env = "MFLOW_TOL_CLOSURE", default_value_t = 1e-9, global = true)]
    pub tol_closure: f64,
    #[arg(long, env = "MFLOW_TOL_BEND_FLOOR", default_value_t = 1e-12, global = true)]
    pub tol_bend_floor: f64,
    /// Relative error per integration step.
    #[arg(long, env = "MFLOW_TOL_FLOW_REL", default_value_t = 1e-8, global = true)]
    pub tol_flow_rel: f64,
    /// Absolute error per integration step.
    #[arg(long, env = "MFLOW_TOL_FLOW_ABS", default_value_t = 1e-10, global = true)]
    pub tol_flow_abs: f64,
    /// Integration stops once Re det falls below this.
    #[arg(long, env = "MFLOW_TOL_DET_STOP", default_value_t = 1e-6, global = true)]
    pub tol_det_stop: f64,
    #[arg(long, env = "MFLOW_MAX_STEPS", default_value_t = 100_000, global = true)]
    pub max_steps: usize,
    /// Number of intervals of the uniform output grid.
    #[arg(long, env = "MFLOW_GRID", default_value_t = 100, global = true)]
    pub grid: usize,
}

impl ConfigArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            hermitian: self.tol_hermitian,
            unitary: self.tol_unitary,
            eig: self.tol_eig,
            polar: self.tol_polar,
            psd: self.tol_psd,
            cluster: self.tol_cluster,
            gt: self.tol_gt,
            grad_floor: self.tol_grad_floor,
            closure: self.tol_closure,
            bend_floor: self.tol_bend_floor,
        }
    }

    pub fn flow(&self) -> FlowConfig {
        FlowConfig {
            m: self.m,
            rel_tol: self.tol_flow_rel,
            abs_tol: self.tol_flow_abs,
            det_stop_tol: self.tol_det_stop,
            max_steps: self.max_steps,
            grid_intervals: self.grid,
            grad_floor: self.tol_grad_floor,
        }
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("seed", self.seed.to_string()),
            ("m", self.m.to_string()),
            ("tol_hermitian", format!("{:e}", self.tol_hermitian)),
            ("tol_unitary", format!("{:e}", self.tol_unitary)),
            ("tol_eig", format!("{:e}", self.tol_eig)),
            ("tol_polar", format!("{:e}", self.tol_polar)),
            ("tol_psd", format!("{:e}", self.tol_psd)),
            ("tol_cluster", format!("{:e}", self.tol_cluster)),
            ("tol_gt", format!("{:e}", self.tol_gt)),
            ("tol_grad_floor", format!("{:e}", self.tol_grad_floor)),
            ("tol_closure", format!("{:e}", self.tol_closure)),
            ("tol_bend_floor", format!("{:e}", self.tol_bend_floor)),
            ("tol_flow_rel", format!("{:e}", self.tol_flow_rel)),
            ("tol_flow_abs", format!("{:e}", self.tol_flow_abs)),
            ("tol_det_stop", format!("{:e}", self.tol_det_stop)),
            ("max_steps", self.max_steps.to_string()),
            ("grid", self.grid.to_string()),
        ]
    }

    /// `name = value  # source` for every setting.
    pub fn describe(&self, matches: &ArgMatches) -> String {
        let mut out = String::new();
        for (name, value) in self.entries() {
            let source = match source_of(matches, name) {
                Some(ValueSource::CommandLine) => "flag",
                Some(ValueSource::EnvVariable) => "env",
                _ => "default",
            };
            out.push_str(&format!("{name} = {value}  # {source}\n"));
        }
        out
    }
}

/// Global args can be given before or after the subcommand; look in the
/// innermost matches first.
fn source_of(matches: &ArgMatches, id: &str) -> Option<ValueSource> {
    let mut chain = vec![matches];
    while let Some((_, sub)) = chain.last().and_then(|m| m.subcommand()) {
        chain.push(sub);
    }
    let sources: Vec<ValueSource> = chain.iter().filter_map(|m| m.value_source(id)).collect();
    sources.iter().copied().max_by_key(|s| match s {
        ValueSource::CommandLine => 2,
        ValueSource::EnvVariable => 1,
        _ => 0,
    })
}
