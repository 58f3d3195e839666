mod common;

use common::{records, FIGURE_EIGHT, TREFOIL};
use knotscan::image::*;
use knotscan::jones::jones;
use knotscan::morse::{MorseEvent, MorseWord};
use knotscan::pd::{parse_pd, PdCode};
use knotscan::table::KnotRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn record(name: &str) -> &'static KnotRecord {
    records().iter().find(|r| r.name == name).unwrap()
}

fn render(pd: &PdCode, seed: u64) -> RasterImage {
    render_pd(pd, &RenderOptions { seed, ..Default::default() }).unwrap()
}

fn solid(pd: &PdCode) -> RasterImage {
    render_pd(pd, &RenderOptions { style: StrokeStyle::Solid, ..Default::default() }).unwrap()
}

fn graph(img: &RasterImage) -> JunctionGraph {
    perceive(img, &DetectOptions::default()).unwrap().1
}

fn has_block(sk: &Skeleton) -> bool {
    (0..sk.height() as i64 - 1).any(|y| {
        (0..sk.width() as i64 - 1).any(|x| sk.get(x, y) && sk.get(x + 1, y) && sk.get(x, y + 1) && sk.get(x + 1, y + 1))
    })
}

#[test]
fn broken_render_has_one_component_per_arc() {
    let trefoil = parse_pd(TREFOIL).unwrap();
    // each under-crossing cuts the curve once: n pieces
    assert_eq!(foreground_components(&binarize(&render(&trefoil, 0)).unwrap()), 3);
    assert_eq!(foreground_components(&binarize(&solid(&trefoil)).unwrap()), 1);
    assert_eq!(foreground_components(&binarize(&render(&PdCode::unknot(), 0)).unwrap()), 1);
}

#[test]
fn polarity_is_detected() {
    let img = render(&parse_pd(FIGURE_EIGHT).unwrap(), 3);
    let inverted = augment(&img, 0, &[AugmentStep::Invert]);
    let bin = binarize(&img).unwrap();
    assert_eq!(bin, binarize(&inverted).unwrap());
    assert!(bin.is_binary());
    assert!(bin.pixels().iter().filter(|&&p| p == 1).count() * 10 < bin.pixels().len());
    assert_eq!(binarize(&bin).unwrap(), bin);
}

#[test]
fn blank_images_are_rejected() {
    let blank = RasterImage::new(64, 64, 255);
    assert!(matches!(binarize(&blank), Err(ImageError::Blank)));
    assert!(matches!(count_crossings(&blank), Err(ImageError::Blank)));
    assert!(RasterImage::from_pixels(0, 4, vec![]).is_err());
}

#[test]
fn skeleton_is_thin_and_keeps_components() {
    for name in ["3_1", "4_1", "7_4", "9_42", "10_120"] {
        let pd = &record(name).pd;
        for img in [render(pd, 1), solid(pd)] {
            let bin = binarize(&img).unwrap();
            let sk = skeletonize(&bin).unwrap();
            assert!(!has_block(&sk), "{name}");
            assert_eq!(sk.components(), foreground_components(&bin), "{name}");
            assert!(!sk.is_degenerate(), "{name}");
        }
    }
}

#[test]
fn unknot_is_one_closed_loop() {
    let img = render_pd(&PdCode::unknot(), &RenderOptions { stroke: 4.0, ..Default::default() }).unwrap();
    let bin = binarize(&img).unwrap();
    let sk = skeletonize(&bin).unwrap();
    assert_eq!(sk.components(), 1);
    for y in 0..sk.height() as i64 {
        for x in 0..sk.width() as i64 {
            if sk.get(x, y) {
                assert_eq!(sk.degree(x, y), 2);
            }
        }
    }
    let jg = detect_junctions(&sk, &DetectOptions::default());
    assert!(jg.junctions.is_empty());
    assert_eq!(jg.arcs.len(), 1);
    assert!(jg.arcs[0].closed);
    assert_eq!(graph_to_pd(&jg).unwrap(), PdCode::unknot());
    assert_eq!(count_crossings(&img).unwrap(), 0);
}

#[test]
fn filled_disk_is_degenerate() {
    let mut img = RasterImage::new(128, 128, 255);
    for y in 0..128 {
        for x in 0..128 {
            if (x as f64 - 64.0).hypot(y as f64 - 64.0) <= 30.0 {
                img.set(x, y, 0);
            }
        }
    }
    let sk = skeletonize(&binarize(&img).unwrap()).unwrap();
    assert_eq!(sk.components(), 1);
    assert!(sk.is_degenerate());
}

#[test]
fn junctions_and_arcs_form_a_four_regular_graph() {
    for (pd, n) in [(parse_pd(TREFOIL).unwrap(), 3), (parse_pd(FIGURE_EIGHT).unwrap(), 4)] {
        let jg = graph(&render(&pd, 0));
        assert_eq!(jg.junctions.len(), n);
        assert_eq!(jg.arcs.len(), 2 * n);
        assert!(jg.junctions.iter().all(|j| j.valence() == 4 && j.kind == JunctionKind::Gap));
        assert!(jg.diagnostics.is_empty(), "{:?}", jg.diagnostics);
    }
}

#[test]
fn solid_crossings_are_found_but_ambiguous() {
    let pd = parse_pd(TREFOIL).unwrap();
    let jg = graph(&solid(&pd));
    assert_eq!(jg.crossing_count(), 3);
    assert!(jg.junctions.iter().all(|j| j.kind == JunctionKind::Branch && j.over.is_none()));
    let ambiguous = jg.diagnostics.iter().filter(|d| matches!(d, Diagnostic::Ambiguous { .. })).count();
    assert_eq!(ambiguous, 3);
    assert!(matches!(graph_to_pd(&jg), Err(GraphError::Unlabeled { .. })));
}

#[test]
fn reconstruction_recovers_crossing_types() {
    let trefoil = parse_pd(TREFOIL).unwrap();
    let pd = image_to_pd(&render(&trefoil, 0), &DetectOptions::default()).unwrap().pd;
    assert_eq!(jones(&pd).unwrap().to_string(), "-q^-4+q^-3+q^-1");
    assert_eq!(pd.writhe().unwrap(), trefoil.writhe().unwrap());
    let mirror = trefoil.mirror().unwrap();
    let pd = image_to_pd(&render(&mirror, 0), &DetectOptions::default()).unwrap().pd;
    assert_eq!(jones(&pd).unwrap(), jones(&mirror).unwrap());
}

#[test]
fn figure_eight_survives_perspective() {
    let pd = parse_pd(FIGURE_EIGHT).unwrap();
    for seed in 0..6 {
        let img = augment(&render(&pd, seed), seed, &[AugmentStep::Perspective { max_tilt: 10.0 }]);
        let rec = image_to_pd(&img, &DetectOptions::default()).unwrap();
        assert_eq!(rec.graph.junctions.iter().filter(|j| j.over.is_some()).count(), 4);
        assert_eq!(jones(&rec.pd).unwrap(), jones(&pd).unwrap());
    }
}

#[test]
fn traversal_start_does_not_change_jones() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for r in records().iter().filter(|r| r.crossing_number <= 7) {
        let jg = graph(&render(&r.pd, 0));
        let ports = 4 * jg.junctions.len();
        for _ in 0..8 {
            let pd = graph_to_pd_from(&jg, rng.gen_range(0..ports)).unwrap();
            assert_eq!(jones(&pd).unwrap(), r.jones, "{}", r.name);
        }
    }
}

#[test]
fn open_curves_are_reported() {
    let pd = parse_pd(TREFOIL).unwrap();
    let mut img = render(&pd, 0);
    // erase a band across the whole picture
    for y in 250..262 {
        for x in 0..img.width() {
            img.set(x, y, PAPER);
        }
    }
    let err = image_to_pd(&img, &DetectOptions::default()).unwrap_err();
    assert!(matches!(err, PerceptionError::Graph(GraphError::OpenCurve { .. })), "{err}");
}

#[test]
fn crossing_counts() {
    assert_eq!(count_crossings(&render(&record("9_1").pd, 0)).unwrap(), 9);
    let trefoil = render(&parse_pd(TREFOIL).unwrap(), 0);
    assert_eq!(count_crossings(&trefoil).unwrap(), 3);
    let turned = augment(&trefoil, 0, &[AugmentStep::FlipH, AugmentStep::Rotate { degrees: 15.0 }]);
    assert_eq!(count_crossings(&turned).unwrap(), 3);
    let quarter = augment(&trefoil, 0, &[AugmentStep::Rotate { degrees: 90.0 }]);
    assert_eq!(count_crossings(&quarter).unwrap(), 3);
}

#[test]
fn reflections_give_the_mirror_knot() {
    let r = record("5_2");
    for step in [AugmentStep::FlipH, AugmentStep::FlipV] {
        let img = augment(&render(&r.pd, 0), 0, &[step]);
        let pd = image_to_pd(&img, &DetectOptions::default()).unwrap().pd;
        assert_eq!(jones(&pd).unwrap(), r.jones.substitute_q_inverse());
    }
}

#[test]
fn seeds_change_layout_not_knot() {
    let pd = &record("6_2").pd;
    let (a, b) = (render(pd, 1), render(pd, 2));
    assert_ne!(a, b);
    assert_eq!(a, render(pd, 1));
    for img in [a, b] {
        let rec = image_to_pd(&img, &DetectOptions::default()).unwrap();
        assert_eq!(jones(&rec.pd).unwrap(), record("6_2").jones);
    }
}

#[test]
fn wide_words_are_refused() {
    let k = 40;
    let mut events: Vec<MorseEvent> = (0..k).map(|_| MorseEvent::cup(0)).collect();
    events.extend((0..k).map(|_| MorseEvent::cap(0)));
    let err = render_word(&MorseWord::new(events), &RenderOptions::default()).unwrap_err();
    assert!(matches!(err, RenderError::TooWide { width: 80, .. }), "{err}");
}

#[test]
fn augmentation_contracts() {
    let img = render(&parse_pd(TREFOIL).unwrap(), 0);
    assert_eq!(augment(&img, 0, &[AugmentStep::FlipH, AugmentStep::FlipH]), img);
    assert_eq!(augment(&img, 0, &[AugmentStep::Rotate { degrees: 90.0 }; 4]), img);
    let recipe = [AugmentStep::Perspective { max_tilt: 10.0 }, AugmentStep::Rotate { degrees: 33.0 }];
    let a = augment(&img, 5, &recipe);
    assert_eq!((a.width(), a.height()), (img.width(), img.height()));
    assert_eq!(a, augment(&img, 5, &recipe));
    assert_ne!(a, augment(&img, 6, &recipe));
    assert_eq!(background(&a), PAPER);
    let bin = augment(&img, 0, &[AugmentStep::Invert, AugmentStep::Binarize]);
    assert_eq!(bin, binarize(&img).unwrap());
}

#[test]
fn png_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let img = render(&parse_pd(FIGURE_EIGHT).unwrap(), 0);
    let path = dir.path().join("x.png");
    img.to_png(&path).unwrap();
    assert_eq!(RasterImage::from_png(&path).unwrap(), img);
    let bin = binarize(&img).unwrap();
    bin.to_png(&path).unwrap();
    assert_eq!(binarize(&RasterImage::from_png(&path).unwrap()).unwrap(), bin);
}

#[test]
fn dataset_is_balanced_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let opts = DatasetOptions { count: 90, seed: 11, crossings: 3..=9, ..Default::default() };
    let rows = dataset_gen(records(), dir.path(), &opts).unwrap();
    assert_eq!(rows.len(), 90);
    for c in 3..=9 {
        let k = rows.iter().filter(|r| r.crossing_count == c).count();
        assert!(k == 12 || k == 13, "{c}: {k}");
    }
    assert_eq!(rows.iter().filter(|r| r.split == Split::Test).count(), 18);
    let manifest = std::fs::read(dir.path().join(MANIFEST_FILE)).unwrap();
    assert!(manifest.starts_with(b"filename,crossing_count,knot_name,seed,split\n"));

    // every image keeps its component count through thinning
    for row in &rows {
        let img = RasterImage::from_png(&dir.path().join(&row.filename)).unwrap();
        let bin = binarize(&img).unwrap();
        assert_eq!(skeletonize(&bin).unwrap().components(), foreground_components(&bin), "{}", row.filename);
    }

    let again = tempfile::tempdir().unwrap();
    dataset_gen(records(), again.path(), &opts).unwrap();
    assert_eq!(std::fs::read(again.path().join(MANIFEST_FILE)).unwrap(), manifest);
}

#[test]
fn dataset_plan_matches_corpus_sizes() {
    let opts = DatasetOptions { count: 9051, test_ratio: 1811.0 / 9051.0, ..Default::default() };
    let plan = plan_dataset(records(), &opts).unwrap();
    assert_eq!(plan.len(), 9051);
    assert_eq!(plan.iter().filter(|p| p.split == Split::Test).count(), 1811);
    let bad = DatasetOptions { crossings: 1..=4, ..Default::default() };
    assert!(matches!(plan_dataset(records(), &bad), Err(DatasetError::EmptyClass(1))));
}
