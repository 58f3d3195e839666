//! Perception: raster diagrams to PD codes and back.

mod augment;
mod binarize;
mod dataset;
mod junction;
mod perceive;
mod raster;
mod render;
mod skeleton;

pub use augment::{augment, background, AugmentStep};
pub use binarize::{binarize, distance_transform, estimate_stroke, foreground_components, otsu_threshold};
pub use dataset::{
    dataset_gen, plan_dataset, random_recipe, DatasetError, DatasetOptions, ManifestRow, PlannedImage, Split,
    MANIFEST_FILE,
};
pub use junction::{
    classify_over_under, detect_junctions, graph_to_pd, graph_to_pd_from, Arc, ArcEnd, DetectOptions, Diagnostic,
    GraphError, Junction, JunctionGraph, JunctionKind, Point, Port,
};
pub use perceive::{count_crossings, image_to_pd, perceive, PerceptionError, Reconstruction};
pub use raster::{ImageError, RasterImage};
pub use render::{render_pd, render_word, RenderError, RenderOptions, StrokeStyle, INK, PAPER};
pub use skeleton::{skeletonize, Skeleton};
