mod common;

use common::{batch_topic_update, max_relative_error, maximize_log_posterior, random_instance, rng};
use ndarray::Array2;
use rand::Rng;
use stringcat_core::evaluation::{gen_multilabel, SyntheticMode, SyntheticSpec, ANIMALS};
use stringcat_core::gamma_poisson::{
    fit_activations, grad_activation, grad_topics, log_likelihood, penalized_objective, ActivationSolver,
    GammaPoissonModel, GammaPoissonParams, GammaPrior, TopicAccumulator,
};
use stringcat_core::textprep::{self, CountMatrix};

fn online_update(counts: &CountMatrix, x: &Array2<f64>, topics: &Array2<f64>) -> Array2<f64> {
    let n = counts.rows();
    let mut acc = TopicAccumulator::new(topics.nrows(), topics.ncols(), 1.0, n);
    for l in 0..n {
        acc.accumulate(topics, counts.row(l), x.row(l).as_slice().unwrap());
    }
    assert!(acc.ready());
    let mut out = topics.clone();
    acc.apply(&mut out);
    out
}

#[test]
fn online_update_matches_batch_recurrence() {
    let mut r = rng(11);
    for _ in 0..20 {
        let inst = random_instance(&mut r, 50, 80, 10, 0.2, 5);
        let online = online_update(&inst.counts, &inst.x, &inst.topics);
        let batch = batch_topic_update(&inst.dense, &inst.x, &inst.topics);
        let err = max_relative_error(&online, &batch);
        assert!(err <= 1e-10, "relative error {err:e}");
    }
}

/// Dense replica of the sparse accumulation, with the same operation order;
/// zero counts contribute exact zeros.
fn dense_accumulate(f: &Array2<f64>, x: &Array2<f64>, topics: &Array2<f64>) -> (Array2<f64>, Vec<f64>) {
    let g = 1e-10;
    let (d, m) = topics.dim();
    let mut a = Array2::zeros((d, m));
    let mut b = vec![0.0; d];
    for l in 0..f.nrows() {
        for j in 0..m {
            if f[[l, j]] == 0.0 {
                continue;
            }
            let mut r = 0.0;
            for i in 0..d {
                r += x[[l, i]] * topics[[i, j]];
            }
            let ratio = f[[l, j]] / (r + g);
            for i in 0..d {
                a[[i, j]] += topics[[i, j]] * (x[[l, i]] * ratio);
            }
        }
        for i in 0..d {
            b[i] += x[[l, i]];
        }
    }
    (a, b)
}

#[test]
fn sparse_accumulation_equals_dense_exactly() {
    let mut r = rng(12);
    for _ in 0..10 {
        let inst = random_instance(&mut r, 15, 20, 4, 0.3, 4);
        let mut acc = TopicAccumulator::new(4, 20, 1.0, 15);
        for l in 0..15 {
            acc.accumulate(&inst.topics, inst.counts.row(l), inst.x.row(l).as_slice().unwrap());
        }
        let mut topics = inst.topics.clone();
        acc.apply(&mut topics);
        let (a, b) = dense_accumulate(&inst.dense, &inst.x, &inst.topics);
        assert_eq!(acc.numerator(), &a);
        assert_eq!(acc.denominator(), &b[..]);

        let prior = GammaPrior::shared(4, 1.1, 1.0);
        let solver = ActivationSolver::new(&inst.topics, &prior).unwrap();
        for l in 0..15 {
            let x = inst.x.row(l).to_vec();
            let mut out = vec![0.0; 4];
            solver.step(inst.counts.row(l), &x, &mut out);
            let mut want = vec![0.0; 4];
            for i in 0..4 {
                let mut s = 0.0;
                for j in 0..20 {
                    let c = inst.dense[[l, j]];
                    if c == 0.0 {
                        continue;
                    }
                    let r: f64 = {
                        let mut r = 0.0;
                        for k in 0..4 {
                            r += x[k] * inst.topics[[k, j]];
                        }
                        r
                    };
                    s += c / (r + 1e-10) * inst.topics[[i, j]];
                }
                let denom = inst.topics.row(i).sum() + 1.0 + 1e-10;
                want[i] = ((x[i] * s + (1.1f64 - 1.0)) / denom).max(1e-10);
            }
            assert_eq!(out, want);
        }
    }
}

fn rel_norm_error(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den
}

#[test]
fn gradients_match_central_differences() {
    let mut r = rng(13);
    let prior = GammaPrior::shared(4, 1.1, 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (d, m) = (4, 12);
        let topics = Array2::from_shape_fn((d, m), |_| r.random_range(0.1..2.0));
        let x: Vec<f64> = (0..d).map(|_| r.random_range(0.1..3.0)).collect();
        let f: Vec<f64> = (0..m).map(|_| f64::from(r.random_range(0..6u32))).collect();
        let ll = |x: &[f64], t: &Array2<f64>| log_likelihood(&f, x, t.view(), &prior).unwrap();

        let analytic = grad_topics(&f, &x, topics.view()).unwrap();
        let mut numeric = Array2::zeros((d, m));
        for i in 0..d {
            for j in 0..m {
                let h = 1e-6 * topics[[i, j]];
                let mut up = topics.clone();
                let mut down = topics.clone();
                up[[i, j]] += h;
                down[[i, j]] -= h;
                numeric[[i, j]] = (ll(&x, &up) - ll(&x, &down)) / (2.0 * h);
            }
        }
        worst = worst.max(rel_norm_error(numeric.as_slice().unwrap(), analytic.as_slice().unwrap()));

        let analytic = grad_activation(&f, &x, topics.view(), &prior).unwrap();
        let numeric: Vec<f64> = (0..d)
            .map(|i| {
                let h = 1e-6 * x[i];
                let mut up = x.clone();
                let mut down = x.clone();
                up[i] += h;
                down[i] -= h;
                (ll(&up, &topics) - ll(&down, &topics)) / (2.0 * h)
            })
            .collect();
        worst = worst.max(rel_norm_error(&numeric, &analytic));
    }
    assert!(worst < 1e-5, "worst relative error {worst:e}");
}

/// One full-batch cycle: activation update of every row, then one topic
/// update with all rows; returns the objective after each half.
fn batch_cycle(counts: &CountMatrix, x: &mut Array2<f64>, topics: &mut Array2<f64>, prior: &GammaPrior<f64>) -> (f64, f64) {
    let n = counts.rows();
    {
        let solver = ActivationSolver::new(topics, prior).unwrap();
        for l in 0..n {
            let old = x.row(l).to_vec();
            let mut out = vec![0.0; old.len()];
            solver.step(counts.row(l), &old, &mut out);
            x.row_mut(l).assign(&ndarray::Array1::from(out));
        }
    }
    let after_x = penalized_objective(counts, x.view(), topics.view(), prior).unwrap();
    let mut acc = TopicAccumulator::new(topics.nrows(), topics.ncols(), 1.0, n);
    for l in 0..n {
        acc.accumulate(topics, counts.row(l), x.row(l).as_slice().unwrap());
    }
    acc.apply(topics);
    let after_t = penalized_objective(counts, x.view(), topics.view(), prior).unwrap();
    (after_x, after_t)
}

#[test]
fn batch_updates_never_increase_the_objective() {
    let mut r = rng(14);
    let prior = GammaPrior::shared(3, 1.1, 1.0);
    for _ in 0..20 {
        let mut inst = random_instance(&mut r, 12, 10, 3, 0.4, 6);
        let mut prev = penalized_objective(&inst.counts, inst.x.view(), inst.topics.view(), &prior).unwrap();
        for _ in 0..50 {
            let (a, b) = batch_cycle(&inst.counts, &mut inst.x, &mut inst.topics, &prior);
            let slack = 1e-12 * prev.abs().max(1.0);
            assert!(a <= prev + slack, "activation half-step rose {prev} -> {a}");
            assert!(b <= a + slack, "topic half-step rose {a} -> {b}");
            prev = b;
        }
    }
}

#[test]
fn converged_activation_maximizes_the_posterior() {
    let mut r = rng(15);
    let prior = GammaPrior::shared(3, 1.1, 1.0);
    for _ in 0..10 {
        let (d, m) = (3, 10);
        let topics = Array2::from_shape_fn((d, m), |_| r.random_range(0.05..1.0));
        let f: Vec<f64> = (0..m).map(|_| f64::from(r.random_range(0..5u32))).collect();
        let row = CountMatrix::from_rows(
            m,
            vec![f.iter().enumerate().filter(|(_, &c)| c > 0.0).map(|(j, &c)| (j, c as u32)).collect()],
        )
        .unwrap();
        if row.row(0).is_empty() {
            continue;
        }
        let fit = fit_activations(row.row(0), &topics, &prior, 1e-12, 1_000_000).unwrap();
        assert!(!fit.capped);
        let best = maximize_log_posterior(&f, &topics, 1.1, 1.0);
        let err = rel_norm_error(&fit.x, &best);
        assert!(err < 1e-3, "{:?} vs {best:?}: {err:e}", fit.x);
    }
}

fn corpus(n: usize, seed: u64) -> Vec<String> {
    gen_multilabel(&SyntheticSpec::new(SyntheticMode::Multilabel, n, seed)).unwrap()
}

fn params(d: usize, seed: u64) -> GammaPoissonParams<f64> {
    let mut p = GammaPoissonParams::new(d);
    p.rng_seed = seed;
    p
}

#[test]
fn warm_started_transform_needs_no_more_iterations() {
    let data = corpus(600, 1);
    let model = GammaPoissonModel::fit(&data, params(8, 1)).unwrap();
    let cold = GammaPoissonModel::from_parts(model.params().clone(), model.vocabulary().clone(), model.topics().clone()).unwrap();
    let mut distinct = data.clone();
    distinct.sort();
    distinct.dedup();
    let (_, warm_stats) = model.transform_with_stats(&distinct).unwrap();
    let (_, cold_stats) = cold.transform_with_stats(&distinct).unwrap();
    assert!(warm_stats.inner_iterations <= cold_stats.inner_iterations);
    let counts = textprep::count_matrix(&distinct, model.vocabulary(), model.params().ngram_range()).unwrap();
    let x = model.transform(&distinct).unwrap();
    let solver = ActivationSolver::new(model.topics(), model.prior()).unwrap();
    for (l, s) in distinct.iter().enumerate() {
        assert!(model.cached_activation(&textprep::normalize(s)).is_some());
        let mut next = vec![0.0; 8];
        solver.step(counts.row(l), x.row(l).as_slice().unwrap(), &mut next);
        let change: f64 = x.row(l).iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(change <= model.params().eps_inner, "{s}: moved {change}");
    }
}

#[test]
fn fit_is_deterministic_and_persists_byte_identically() {
    let data = corpus(400, 2);
    let a = GammaPoissonModel::fit(&data, params(5, 9)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| GammaPoissonModel::fit(&data, params(5, 9)).unwrap());
    assert_eq!(a.topics(), b.topics());
    let (da, db) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    a.save(da.path()).unwrap();
    b.save(db.path()).unwrap();
    for file in ["vocab.txt", "topics.mat", "params.json", "cache.tsv"] {
        let fa = std::fs::read(da.path().join(file)).unwrap();
        let fb = std::fs::read(db.path().join(file)).unwrap();
        assert!(fa == fb, "{file} differs");
    }

    let loaded = GammaPoissonModel::<f64>::load(da.path()).unwrap();
    assert_eq!(loaded.topics(), a.topics());
    assert_eq!(loaded.metadata(), a.metadata());
    assert_eq!(loaded.transform(&data).unwrap(), a.transform(&data).unwrap());
    let dc = tempfile::tempdir().unwrap();
    loaded.save(dc.path()).unwrap();
    for file in ["vocab.txt", "topics.mat", "params.json", "cache.tsv"] {
        assert_eq!(std::fs::read(da.path().join(file)).unwrap(), std::fs::read(dc.path().join(file)).unwrap());
    }
}

#[test]
fn different_seeds_give_different_models() {
    let data = corpus(300, 3);
    let a = GammaPoissonModel::fit(&data, params(4, 1)).unwrap();
    let b = GammaPoissonModel::fit(&data, params(4, 2)).unwrap();
    assert_ne!(a.topics(), b.topics());
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn small_fraction(x: &Array2<f64>) -> f64 {
    median(
        x.rows()
            .into_iter()
            .map(|r| {
                let max = r.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                r.iter().filter(|v| v.abs() < 0.1 * max).count() as f64 / r.len() as f64
            })
            .collect(),
    )
}

#[test]
fn activations_are_sparser_than_an_svd_embedding() {
    let data = corpus(1000, 4);
    let model = GammaPoissonModel::fit(&data, params(8, 4)).unwrap();
    let x = model.transform(&data).unwrap();
    assert!(x.iter().all(|&v| v >= 0.0));
    assert!(model.topics().iter().all(|&v| v >= 0.0));

    let counts = textprep::count_matrix(&data, model.vocabulary(), model.params().ngram_range()).unwrap();
    let dense = counts.to_dense();
    let m = nalgebra::DMatrix::from_fn(dense.len(), counts.cols(), |i, j| f64::from(dense[i][j]));
    let svd = m.svd(true, false);
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let u = svd.u.unwrap();
    let embedding = Array2::from_shape_fn((dense.len(), 8), |(i, k)| u[(i, order[k])] * svd.singular_values[order[k]]);

    let (gp, baseline) = (small_fraction(&x), small_fraction(&embedding));
    assert!(gp > baseline, "gamma-poisson {gp} vs svd {baseline}");
}

#[test]
fn single_topic_probe_activates_its_topic() {
    let words = ["xyzw", "abcd", "mnop"];
    let vocab = textprep::Vocabulary::build(&words, textprep::NGramRange::default()).unwrap();
    let counts = textprep::count_matrix(&words, &vocab, textprep::NGramRange::default()).unwrap();
    let mut topics = Array2::from_elem((3, vocab.len()), 1e-10);
    for (t, row) in counts.iter_rows().enumerate() {
        for (j, c) in row.iter() {
            topics[[t, j]] = f64::from(c);
        }
    }
    let model = GammaPoissonModel::from_parts(params(3, 0), vocab, topics).unwrap();
    // Unseen, but only "abc" and "bcd"-style grams of topic 1 are in vocabulary.
    let x = model.transform(&["zabcz"]).unwrap();
    let argmax = (0..3).max_by(|&a, &b| x[[0, a]].total_cmp(&x[[0, b]])).unwrap();
    assert_eq!(argmax, 1, "{x:?}");
}

#[test]
fn feature_names_recover_the_animals() {
    let data = corpus(2000, 5);
    let model = GammaPoissonModel::fit(&data, params(8, 5)).unwrap();
    let names = model.infer_feature_names(&data, 1).unwrap();
    assert_eq!(names.len(), 8);
    assert!(names.iter().all(|n| n.len() == 1));
    let mut top: Vec<&str> = names.iter().map(|n| n[0].as_str()).filter(|w| ANIMALS.contains(w)).collect();
    top.sort_unstable();
    top.dedup();
    assert!(top.len() >= 6, "{names:?}");
    let two = model.feature_names(2).unwrap();
    assert!(two.iter().all(|n| n.len() == 2));
}

#[test]
fn a_single_repeated_word_labels_every_dimension() {
    let data = vec!["tiger".to_string(); 20];
    let model = GammaPoissonModel::fit(&data, params(3, 0)).unwrap();
    assert!(model.metadata().init.as_ref().unwrap().fallback);
    for n in model.infer_feature_names(&data, 1).unwrap() {
        assert_eq!(n, ["tiger"]);
    }
}

#[test]
fn out_of_vocabulary_strings_get_the_prior_mode() {
    let data = corpus(200, 6);
    let model = GammaPoissonModel::fit(&data, params(4, 6)).unwrap();
    let (x, stats) = model.transform_with_stats(&["qqqq"]).unwrap();
    assert_eq!(stats.empty_rows, 1);
    for &v in x.row(0) {
        assert!((v - 0.1).abs() < 1e-12);
    }
}

#[test]
fn fit_records_a_trace() {
    let data = corpus(600, 7);
    let model = GammaPoissonModel::fit(&data, params(8, 7)).unwrap();
    let report = model.metadata().fit.as_ref().unwrap();
    assert!(!report.trace.is_empty() && report.trace.len() <= report.epochs);
    assert!(report.trace_csv().starts_with("epoch,gkl\n"));
    assert!(model.metadata().stats.topic_updates >= 1);
    assert_eq!(report.converged, !model.not_converged());
}

#[test]
fn single_precision_models_fit() {
    let data = corpus(300, 8);
    let mut p = GammaPoissonParams::<f32>::new(4);
    p.rng_seed = 8;
    let model = GammaPoissonModel::fit(&data, p).unwrap();
    let x = model.transform(&data).unwrap();
    assert!(x.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn empty_corpus_and_bad_params_are_rejected() {
    let empty: Vec<String> = Vec::new();
    assert!(GammaPoissonModel::fit(&empty, params(2, 0)).is_err());
    let mut p = params(2, 0);
    p.rho = 1.5;
    assert_eq!(GammaPoissonModel::fit(&corpus(10, 0), p).unwrap_err().kind(), "config");
    assert_eq!(
        GammaPoissonModel::fit(&["", ""], params(2, 0)).unwrap_err().kind(),
        "empty-vocabulary"
    );
}
