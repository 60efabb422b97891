use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use xlift::alignment::*;
use xlift::embedding::{normalize_rows, EmbeddingMatrix, Vocabulary};
use xlift::linalg::{max_abs_diff, random_orthogonal};
use xlift::retrieval::{evaluate_mapping, RetrievalMethod};
use xlift::synth::make_rotation_instance;

fn named(prefix: &str, rows: Array2<f64>) -> EmbeddingMatrix {
    let names = (0..rows.nrows()).map(|i| format!("{prefix}{i}")).collect();
    normalize_rows(&EmbeddingMatrix::new(Vocabulary::from_ranked(names).unwrap(), rows).unwrap()).unwrap()
}

#[test]
fn adversarial_training_recovers_a_rotation_of_clustered_points() {
    let (n, d) = (2000, 10);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let centres: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..d).map(|j| rng.sample::<f64, _>(StandardNormal) * 3.0 / (1.0 + j as f64)).collect())
        .collect();
    let x = Array2::from_shape_fn((n, d), |(i, j)| centres[i % 8][j] + 0.3 * rng.sample::<f64, _>(StandardNormal));
    let r = random_orthogonal(d, &mut rng);
    let y = x.dot(&r.t());
    let (x, y) = (named("s", x), named("t", y));
    let dict: Dictionary = (0..n).map(|i| (format!("s{i}"), format!("t{i}"))).collect();

    let p = AdversarialParams {
        seed: 1,
        disc_hidden: 64,
        ..AdversarialParams::desk()
    };
    let adv = adversarial_train(&x, &y, &p).unwrap();
    assert!(max_abs_diff(&adv.w, &r) < 0.5);
    let refined = refine(&adv, &x, &y, RefineParams { iters: 5, max_rank: 2000, csls_k: 10 }).unwrap();
    assert!(max_abs_diff(&refined.w, &r) < 1e-6);
    let acc = evaluate_mapping(&refined, &x, &y, &dict, RetrievalMethod::default()).unwrap().acc(1);
    assert_eq!(acc, 1.0);
}

#[test]
fn refinement_from_a_noisy_start_converges_to_procrustes() {
    let inst = make_rotation_instance(500, 8, 0.01, 3).unwrap();
    let supervised = procrustes(&inst.x, &inst.y, &inst.dict).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let jitter = Array2::from_shape_simple_fn((8, 8), || 0.05 * rng.sample::<f64, _>(StandardNormal));
    let start = MappingModel {
        w: xlift::linalg::nearest_orthogonal(&(&inst.w_true + &jitter)),
        ..MappingModel::identity(8)
    };
    let refined = refine(&start, &inst.x, &inst.y, RefineParams { iters: 5, max_rank: 500, csls_k: 10 }).unwrap();
    assert!(max_abs_diff(&refined.w, &supervised.w) < 1e-3);
}
