//! CSV time series. Values are printed with `{:e}` — the shortest scientific
//! form that parses back to the same bits — so identical runs produce
//! identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::observables::ObservableRecord;

pub const CSV_HEADER: &str = "t,energy_E,mass_phi,momentum_u1,momentum_u2,mean_theta,entropy,\
entropy_production_rate,diss_u,diss_theta,diss_mu,neg_moment_2,norm_u_H1r,norm_phi_H3,\
norm_theta_V,norm_Ktheta_V,norm_invtheta_L1,stationary_residual,mu_mean";

pub fn format_record(r: &ObservableRecord) -> String {
    format!(
        "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
        r.t,
        r.energy,
        r.phi_mean,
        r.u_mean[0],
        r.u_mean[1],
        r.theta_mean,
        r.entropy,
        r.entropy_production_rate,
        r.diss_u,
        r.diss_theta,
        r.diss_mu,
        r.neg_moment_2,
        r.norm_u_h1r,
        r.norm_phi_h3,
        r.norm_theta_v,
        r.norm_k_theta_v,
        r.norm_inv_theta_l1,
        r.stationary_residual,
        r.mu_mean,
    )
}

pub fn series_to_string(records: &[ObservableRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 256);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(out, "{}", format_record(r)).expect("string write cannot fail");
    }
    out
}

pub fn write_series(records: &[ObservableRecord], path: &Path) -> Result<()> {
    fs::write(path, series_to_string(records)).map_err(|e| Error::io(path, e))
}
