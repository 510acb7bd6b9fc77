//! On a Gaussian chunk law the posterior-mean oracle is the Bayes-optimal
//! noise predictor, so its Monte-Carlo MSE is the irreducible floor. A
//! trained network must land within 10% of that floor.

use rand::Rng;

use fgo_core::chunk::ActionChunk;
use fgo_core::denoiser::{Denoiser, DenoiserInput, GaussianOracle, MlpConfig, MlpDenoiser};
use fgo_core::rng::{gaussian_chunk, seeded_rng};
use fgo_core::schedule::{forward_diffuse, make_schedule, sample_cutoff, FgoConfig, ScheduleKind};
use fgo_core::spectral::low_pass;
use fgo_core::training::{TrainConfig, Trainer};

#[test]
fn trained_mlp_approaches_oracle_mse() {
    let n = 8;
    let k_train = 50;
    let sched = make_schedule(k_train, ScheduleKind::SquaredCosine).unwrap();
    let fgo = FgoConfig::new(3, 0.2, 0.5, n).unwrap();

    // Zero context keeps the oracle the exact Bayes predictor; an
    // informative context would put the floor below the oracle's MSE.
    let mut rng = seeded_rng(42);
    let mu = low_pass(&gaussian_chunk(&mut rng, n, 1), 4).unwrap();
    let stds = ActionChunk::from_column(&[1.0, 0.8, 0.7, 0.5, 0.4, 0.3, 0.2, 0.15]).unwrap();
    let oracle = GaussianOracle::from_dct_diagonal(&mu, &stds, 0, sched.clone()).unwrap();

    let n_data = 4096;
    let contexts: Vec<Vec<f64>> = vec![vec![]; n_data];
    let chunks: Vec<ActionChunk> =
        (0..n_data).map(|_| oracle.sample_clean(&mut rng).unwrap()).collect();

    let mlp_cfg = MlpConfig {
        chunk_len: n,
        dims: 1,
        context_dim: 0,
        hidden_width: 64,
        hidden_layers: 3,
        embed_dim: 16,
    };
    let mut model = MlpDenoiser::init(mlp_cfg, &mut seeded_rng(7)).unwrap();
    // 2000 optimizer steps: 4096 samples / batch 256 = 16 steps per epoch.
    let train_cfg = TrainConfig {
        epochs: 125,
        batch_size: 256,
        learning_rate: 3e-3,
        seed: 3,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::new(&fgo, &sched, train_cfg, &model).unwrap();
    let report = trainer.train(&mut model, &contexts, &chunks).unwrap();
    assert_eq!(report.steps.len(), 2000);

    // Monte-Carlo MSE of both predictors over the same fresh draws, with
    // (k, f) drawn exactly as in training.
    let mut eval_rng = seeded_rng(1234);
    let draws = 10_000;
    let mut mse_oracle = 0.0;
    let mut mse_model = 0.0;
    for _ in 0..draws {
        let k = eval_rng.random_range(1..=k_train);
        let f = sample_cutoff(&mut eval_rng, k, &fgo, k_train).unwrap();
        let clean = oracle.sample_clean(&mut eval_rng).unwrap();
        let truncated = low_pass(&clean, f).unwrap();
        let eps = gaussian_chunk(&mut eval_rng, n, 1);
        let noisy = forward_diffuse(&truncated, k, &eps, &sched).unwrap();
        let input = DenoiserInput { noisy: &noisy, step: k, context: &[], cutoff: f };
        mse_oracle += oracle.predict(&input).unwrap().sub(&eps).norm_sq();
        mse_model += model.predict(&input).unwrap().sub(&eps).norm_sq();
    }
    mse_oracle /= (draws * n) as f64;
    mse_model /= (draws * n) as f64;

    assert!(
        mse_model >= mse_oracle * 0.98,
        "model mse {mse_model} dips below the Bayes floor {mse_oracle}"
    );
    assert!(
        mse_model <= mse_oracle * 1.10,
        "model mse {mse_model} more than 10% above oracle floor {mse_oracle}"
    );
}
