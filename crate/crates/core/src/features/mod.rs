//! Feature engineering: z-score scaling, weather clustering and the
//! supervised feature sets.

mod kmeans;
mod matrix;
mod scaler;

pub use kmeans::{
    inertia, kmeans_assign, kmeans_fit, squared_distance, ClusterModel, KMeansConfig, KMeansFit,
    CLUSTER_FEATURES,
};
pub use matrix::{
    build_features, ColumnKind, FeatureColumn, FeatureMatrix, FeatureOptions, FeatureSpec,
    WeatherMode,
};
pub use scaler::{zscore_apply, zscore_fit, ScalerParams};
