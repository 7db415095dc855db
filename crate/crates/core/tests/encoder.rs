use stringcat_core::encoder::{EncoderKind, EncoderSpec, StringEncoder};
use stringcat_core::evaluation::{gen_multilabel, SyntheticMode, SyntheticSpec};

fn corpus() -> Vec<String> {
    gen_multilabel(&SyntheticSpec::new(SyntheticMode::Multilabel, 400, 2)).unwrap()
}

fn build(kind: EncoderKind, d: usize, seed: u64) -> Box<dyn StringEncoder<f64>> {
    let mut spec = EncoderSpec::new(kind, d);
    spec.seed = seed;
    spec.build().unwrap()
}

#[test]
fn minhash_fit_is_a_no_op() {
    let data = corpus();
    let plain = build(EncoderKind::Minhash, 12, 0).transform(&data).unwrap();
    let mut fitted = build(EncoderKind::Minhash, 12, 0);
    fitted.fit(&data).unwrap();
    assert_eq!(fitted.transform(&data).unwrap(), plain);
    assert_eq!(fitted.fit_transform(&data).unwrap(), plain);
}

#[test]
fn gamma_poisson_same_seed_same_transform() {
    let data = corpus();
    let mut a = build(EncoderKind::GammaPoisson, 5, 9);
    let mut b = build(EncoderKind::GammaPoisson, 5, 9);
    assert_eq!(a.fit_transform(&data).unwrap(), b.fit_transform(&data).unwrap());
    let names = a.feature_names(2).unwrap();
    assert_eq!(names.len(), 5);
    assert!(names.iter().all(|n| n.split(", ").count() == 2), "{names:?}");
    assert_eq!(a.feature_names(1).unwrap().len(), 5);
}

#[test]
fn every_encoder_rejects_empty_input_and_unfitted_use() {
    for kind in [EncoderKind::Minhash, EncoderKind::GammaPoisson, EncoderKind::Onehot, EncoderKind::Similarity] {
        let mut enc = build(kind, 4, 0);
        assert_eq!(enc.kind(), kind);
        assert!(enc.fit(&[]).is_err(), "{kind}");
        if kind != EncoderKind::Minhash {
            assert_eq!(enc.transform(&corpus()).unwrap_err().kind(), "not-fitted", "{kind}");
        }
    }
    let spec = EncoderSpec::<f64>::new(EncoderKind::Minhash, 0);
    assert_eq!(spec.build().err().unwrap().kind(), "config");
}

#[test]
fn spec_round_trips_through_json() {
    let mut spec = EncoderSpec::<f64>::new(EncoderKind::GammaPoisson, 6);
    spec.seed = 17;
    let text = serde_json::to_string(&spec).unwrap();
    let back: EncoderSpec<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
    assert_eq!(back.gamma_poisson_params().rng_seed, 17);
    assert_eq!(back.gamma_poisson_params().d, 6);
}
