//! Two extensions of the baseline game: havens that decide on commitment one by one, and
//! pre-tax profits that shrink with the non-haven's rate.

pub mod decentralised;
pub mod real_response;

pub use decentralised::{
    commitment_gain, commitment_gain_direct, decentralised_equilibrium, decentralised_thresholds,
    DecentralisedOutcome, DecentralisedThresholds, Selection,
};
pub use real_response::{
    real_response_equilibrium, real_response_regime0, real_response_thresholds, RealResponseParams,
    RegimeZero, SwitchPoint,
};
