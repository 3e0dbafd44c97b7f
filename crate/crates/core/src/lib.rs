//! Exact quench dynamics of nearest-neighbour concurrence and quantum discord
//! in the infinite anisotropic XY chain in a transverse field.
//!
//! The pipeline for one point is
//! [`correlators`] -> [`two_site_state`] -> [`quantum_discord`]:
//!
//! ```
//! use quenchcorr_core::{correlators, quantum_discord, two_site_state, Grid, ModelParams};
//!
//! let params = ModelParams::new(1.4, 0.2, 0.5).steady();
//! let corr = correlators(&params, Grid::Thermodynamic).unwrap();
//! let q = quantum_discord(&two_site_state(&corr).unwrap());
//! assert!((q.concurrence - 0.186).abs() < 5e-3);
//! ```

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod state;
pub mod sweep;

pub use dynamics::{
    correlators, magnetization, mode_integrands, mode_observables, steady_state_correlators, transverse_correlator,
    xy_correlator, zz_correlator, CorrelatorSet, Grid, ModeObservables,
};
pub use error::{Error, Result};
pub use measures::{
    concurrence, delta_qcorr, mutual_information, qcorr_at, quantum_discord, quantum_discord_with, von_neumann_entropy,
    DiscordOptions, OptCertificate, QCorrDelta, QCorrResult,
};
pub use model::{
    dispersion, evolution_coeffs, thermal_mode_coeffs, Beta, Evolution, ModeCoeffs, ModelParams, ThermalBlock, Time,
};
pub use oracle::{validate, Channel, Check, OracleReport, Tolerances};
pub use state::{local_state, two_site_state, Site, TwoSiteState};
pub use sweep::{correlator_sweep, sweep, AxisSpec, ParamAxis, ParamGrid, SweepRow};
