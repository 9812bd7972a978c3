//! Surrogate modelling and topology search: graph features, a feedforward
//! regression network, and a genetic optimizer over edge masks.

pub mod features;
pub mod ga;
pub mod net;

pub use features::{extract_features, feature_len, Standardizer, FEATURE_VERSION};
pub use ga::{ga_optimize, repair, GaConfig, GaResult};
pub use net::{gradient_error, train_mlp, train_surrogate, Mlp, NetConfig, SurrogateNet, TrainedMlp};
