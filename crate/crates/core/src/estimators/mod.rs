//! Estimators from raw samples: plug-in tables with bias correction,
//! Gaussian closed forms, and nearest-neighbor estimators.

pub mod gaussian;
pub mod knn;
pub mod neighbors;
pub mod plugin;

pub use gaussian::{gaussian_conditional_mi, gaussian_entropy, gaussian_mi, GaussianModel};
pub use knn::{
    kl_entropy, kl_entropy_columns, ksg_cmi_columns, ksg_conditional_mi, ksg_mi, ksg_mi_columns, KnnConfig,
    KnnEstimate, KsgVariant,
};
pub use neighbors::{Points, Search};
pub use plugin::{miller_madow, miller_madow_entropy, plugin_cmi, plugin_entropy, plugin_mi};
