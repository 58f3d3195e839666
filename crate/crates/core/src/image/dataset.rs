use std::ops::RangeInclusive;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::augment::{augment, AugmentStep};
use super::raster::ImageError;
use super::render::{render_pd, RenderError, RenderOptions};
use crate::table::KnotRecord;

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub filename: String,
    pub crossing_count: usize,
    pub knot_name: String,
    pub seed: u64,
    pub split: Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Clone, Debug)]
pub struct DatasetOptions {
    pub count: usize,
    pub seed: u64,
    pub test_ratio: f64,
    pub crossings: RangeInclusive<usize>,
    pub render: RenderOptions,
    pub max_tilt: f64,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            count: 90,
            seed: 0,
            test_ratio: 0.2,
            crossings: 3..=10,
            render: RenderOptions::default(),
            max_tilt: 10.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no source knots with {0} crossings")]
    EmptyClass(usize),
    #[error("test ratio {0} outside [0, 1]")]
    Ratio(f64),
    #[error("{name}: {source}")]
    Render { name: String, source: RenderError },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Perspective tilt, random flips, a random quarter turn plus up to 15°,
/// then invert and binarize so strands are 1 on 0.
pub fn random_recipe<R: Rng>(rng: &mut R, max_tilt: f64) -> Vec<AugmentStep> {
    let mut steps = vec![AugmentStep::Perspective { max_tilt }];
    if rng.gen_bool(0.5) {
        steps.push(AugmentStep::FlipH);
    }
    if rng.gen_bool(0.5) {
        steps.push(AugmentStep::FlipV);
    }
    let degrees = 90.0 * rng.gen_range(0..4) as f64 + rng.gen_range(-15.0..=15.0);
    steps.push(AugmentStep::Rotate { degrees });
    steps.push(AugmentStep::Invert);
    steps.push(AugmentStep::Binarize);
    steps
}

#[derive(Clone, Debug)]
pub struct PlannedImage<'a> {
    pub record: &'a KnotRecord,
    pub seed: u64,
    pub recipe: Vec<AugmentStep>,
    pub split: Split,
}

/// Chooses knots, seeds, recipes and splits: `count` images dealt round-robin
/// over the crossing numbers, each class cycling through a shuffled deck of
/// its knots, and exactly `round(count * test_ratio)` test rows.
pub fn plan_dataset<'a>(
    records: &'a [KnotRecord],
    opts: &DatasetOptions,
) -> Result<Vec<PlannedImage<'a>>, DatasetError> {
    if !(0.0..=1.0).contains(&opts.test_ratio) {
        return Err(DatasetError::Ratio(opts.test_ratio));
    }
    let classes: Vec<Vec<&KnotRecord>> = opts
        .crossings
        .clone()
        .map(|c| {
            let members: Vec<&KnotRecord> = records.iter().filter(|r| r.crossing_number == c).collect();
            if members.is_empty() {
                Err(DatasetError::EmptyClass(c))
            } else {
                Ok(members)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut plan = Vec::with_capacity(opts.count);
    let mut decks: Vec<Vec<&KnotRecord>> = vec![Vec::new(); classes.len()];
    for i in 0..opts.count {
        let c = i % classes.len();
        if decks[c].is_empty() {
            decks[c] = classes[c].clone();
            decks[c].shuffle(&mut rng);
        }
        let record = decks[c].pop().expect("refilled above");
        let seed = rng.gen::<u64>();
        let recipe = random_recipe(&mut rng, opts.max_tilt);
        plan.push(PlannedImage { record, seed, recipe, split: Split::Train });
    }
    let n_test = (opts.count as f64 * opts.test_ratio).round() as usize;
    let mut order: Vec<usize> = (0..opts.count).collect();
    order.shuffle(&mut rng);
    for &i in &order[..n_test] {
        plan[i].split = Split::Test;
    }
    Ok(plan)
}

/// Renders the planned images in parallel, writes them with `manifest.csv`
/// into `out_dir` and returns the manifest. Everything is fixed by
/// `opts.seed`.
pub fn dataset_gen(
    records: &[KnotRecord],
    out_dir: &Path,
    opts: &DatasetOptions,
) -> Result<Vec<ManifestRow>, DatasetError> {
    let plan = plan_dataset(records, opts)?;
    std::fs::create_dir_all(out_dir)?;
    let width = opts.count.max(1).to_string().len().max(5);
    let rows: Vec<ManifestRow> = plan
        .par_iter()
        .enumerate()
        .map(|(i, PlannedImage { record, seed, recipe, split })| {
            let filename = format!("{i:0width$}_{}.png", record.name);
            let render = RenderOptions { seed: *seed, ..opts.render };
            let img = render_pd(&record.pd, &render)
                .map_err(|source| DatasetError::Render { name: record.name.clone(), source })?;
            augment(&img, *seed, recipe).to_png(&out_dir.join(&filename))?;
            Ok(ManifestRow {
                filename,
                crossing_count: record.crossing_number,
                knot_name: record.name.clone(),
                seed: *seed,
                split: *split,
            })
        })
        .collect::<Result<_, DatasetError>>()?;
    let mut w = csv::Writer::from_path(out_dir.join(MANIFEST_FILE))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}
