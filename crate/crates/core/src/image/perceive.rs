use thiserror::Error;

use super::binarize::binarize;
use super::junction::{classify_over_under, detect_junctions, graph_to_pd, DetectOptions, GraphError, JunctionGraph};
use super::raster::{ImageError, RasterImage};
use super::skeleton::skeletonize;
use crate::pd::PdCode;

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub pd: PdCode,
    pub graph: JunctionGraph,
}

/// Binarize, thin, detect junctions and label them; the graph is returned
/// even when it cannot be turned into a PD code.
pub fn perceive(img: &RasterImage, opts: &DetectOptions) -> Result<(RasterImage, JunctionGraph), ImageError> {
    let bin = binarize(img)?;
    let sk = skeletonize(&bin)?;
    let jg = classify_over_under(detect_junctions(&sk, opts), &bin, opts);
    Ok((bin, jg))
}

pub fn image_to_pd(img: &RasterImage, opts: &DetectOptions) -> Result<Reconstruction, PerceptionError> {
    let (_, graph) = perceive(img, opts)?;
    let pd = graph_to_pd(&graph)?;
    Ok(Reconstruction { pd, graph })
}

/// Number of resolved four-valent junctions.
pub fn count_crossings(img: &RasterImage) -> Result<usize, ImageError> {
    let opts = DetectOptions::default();
    let bin = binarize(img)?;
    let sk = skeletonize(&bin)?;
    Ok(detect_junctions(&sk, &opts).crossing_count())
}
