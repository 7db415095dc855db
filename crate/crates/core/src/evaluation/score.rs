use std::collections::BTreeMap;

/// Per dataset group, rescales each configuration's score to
/// `100 * (s - min) / (max - min)`. A group whose scores are all equal has
/// no defined relative score and maps every configuration to `None`.
pub fn relative_score(
    groups: &BTreeMap<String, BTreeMap<String, f64>>,
) -> BTreeMap<String, BTreeMap<String, Option<f64>>> {
    groups
        .iter()
        .map(|(dataset, scores)| {
            let min = scores.values().copied().fold(f64::INFINITY, f64::min);
            let max = scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
            let rescaled = scores
                .iter()
                .map(|(config, &s)| {
                    let r = (max > min).then(|| 100.0 * (s - min) / (max - min));
                    (config.clone(), r)
                })
                .collect();
            (dataset.clone(), rescaled)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(scores: &[(&str, f64)]) -> BTreeMap<String, BTreeMap<String, f64>> {
        let inner = scores.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        BTreeMap::from([("ds".to_string(), inner)])
    }

    #[test]
    fn endpoints_and_middle() {
        let r = relative_score(&group(&[("a", 0.2), ("b", 0.8)]));
        assert_eq!(r["ds"]["a"], Some(0.0));
        assert_eq!(r["ds"]["b"], Some(100.0));
        let r = relative_score(&group(&[("a", 0.2), ("b", 0.5), ("c", 0.8)]));
        assert!((r["ds"]["b"].unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn flat_group_is_missing() {
        let r = relative_score(&group(&[("a", 0.4), ("b", 0.4)]));
        assert_eq!(r["ds"]["a"], None);
    }
}
