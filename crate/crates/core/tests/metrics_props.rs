mod common;

use promptseg::metrics::{aggregate, match_instances, pixel_confusion, scores, ImageEvaluation};
use promptseg::raster::{label_components, BinaryMask};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_pair() -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
    (2u32..=16, 2u32..=16, any::<u64>()).prop_map(|(w, h, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gt = common::random_rect_scene(&mut rng, w.max(3), h.max(3), 4);
        let pred = common::random_rect_scene(&mut rng, w.max(3), h.max(3), 4);
        (pred, gt)
    })
}

fn evaluate(pred: &BinaryMask, gt: &BinaryMask) -> ImageEvaluation {
    ImageEvaluation::evaluate(
        "s",
        pred,
        gt,
        &label_components(pred),
        &label_components(gt),
        0.5,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn confusion_matches_enumeration((pred, gt) in arb_pair()) {
        let c = pixel_confusion(&pred, &gt).unwrap();
        prop_assert_eq!((c.tp, c.fp, c.fn_, c.tn), common::brute_confusion(&pred, &gt));
        prop_assert_eq!(c.total(), (pred.width() * pred.height()) as u64);
    }

    #[test]
    fn scores_are_bounded_and_f1_dominates_iou((pred, gt) in arb_pair()) {
        let s = scores(&pixel_confusion(&pred, &gt).unwrap());
        for v in [s.precision, s.recall, s.iou, s.f1] {
            prop_assert!((0.0..=100.0).contains(&v));
        }
        prop_assert!(s.f1 >= s.iou - 1e-9);
    }

    #[test]
    fn pair_scores_satisfy_dice_jaccard((pred, gt) in arb_pair()) {
        let e = evaluate(&pred, &gt);
        for ps in &e.pair_scores {
            prop_assert!(ps.jaccard > 0.0 && ps.jaccard <= 1.0);
            prop_assert!((ps.dice - 2.0 * ps.jaccard / (1.0 + ps.jaccard)).abs() <= 1e-12);
        }
        let r = e.report();
        prop_assert!(r.tp_f1 >= r.tp_iou - 1e-9);
        prop_assert_eq!(r.tp_defined, !e.matches.pairs.is_empty());
    }

    #[test]
    fn matching_is_one_to_one_and_complete((pred, gt) in arb_pair()) {
        let p = label_components(&pred);
        let g = label_components(&gt);
        let m = match_instances(&p, &g, 0.5);
        let mut seen_p: Vec<u32> = m.pairs.iter().map(|x| x.pred_id).chain(m.unmatched_pred.iter().copied()).collect();
        let mut seen_g: Vec<u32> = m.pairs.iter().map(|x| x.gt_id).chain(m.unmatched_gt.iter().copied()).collect();
        seen_p.sort();
        seen_g.sort();
        prop_assert_eq!(seen_p, p.iter().map(|i| i.id()).collect::<Vec<_>>());
        prop_assert_eq!(seen_g, g.iter().map(|i| i.id()).collect::<Vec<_>>());
        prop_assert!(m.pairs.iter().all(|x| x.iou >= 0.5));
    }

    #[test]
    fn adding_a_false_positive_never_raises_precision((pred, gt) in arb_pair()) {
        let before = scores(&pixel_confusion(&pred, &gt).unwrap());
        let mut worse = pred.clone();
        let spot = gt.ones().count() < (gt.width() * gt.height()) as usize;
        if spot {
            let (w, h) = gt.dims();
            let free = (0..w * h).map(|i| (i % w, i / w)).find(|&(x, y)| !gt.get(x, y) && !pred.get(x, y));
            if let Some((x, y)) = free {
                worse.set(x, y, true);
                let after = scores(&pixel_confusion(&worse, &gt).unwrap());
                prop_assert!(after.precision <= before.precision);
                prop_assert!(after.iou <= before.iou);
                prop_assert_eq!(after.recall, before.recall);
            }
        }
    }

    #[test]
    fn micro_average_pools_counts(pairs in proptest::collection::vec(arb_pair(), 1..5)) {
        let evals: Vec<ImageEvaluation> = pairs.iter().map(|(p, g)| evaluate(p, g)).collect();
        let r = aggregate(&evals).unwrap();
        let tp: u64 = evals.iter().map(|e| e.counts.tp).sum();
        let fp: u64 = evals.iter().map(|e| e.counts.fp).sum();
        prop_assert_eq!(r.counts.tp, tp);
        prop_assert_eq!(r.counts.fp, fp);
        let pairs_total: usize = evals.iter().map(|e| e.pair_scores.len()).sum();
        prop_assert_eq!(r.tp_defined, pairs_total > 0);
    }
}

#[test]
fn perfect_prediction_scores_one_hundred() {
    let gt = BinaryMask::from_rows(&["##..#", "##..#", ".....", "###.."]).unwrap();
    let r = evaluate(&gt, &gt).report();
    assert_eq!(r.columns(), [100.0; 6]);
    assert_eq!(r.per_image[0].matches.pairs.len(), 3);
}
