use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ClassifierError, Label, TitleExample};

/// Per-class train sizes for a stratified split.
///
/// The train set gets `floor(ratio * n)` examples overall. Each class starts
/// at `floor(ratio * count)` and the leftover slots go to the classes with the
/// largest fractional parts, so every class lands within one example of its
/// exact share. With counts 23481/21417 and ratio 0.8 this leaves 4696/4284
/// for validation.
pub fn stratified_split_counts(
    class_counts: &[usize],
    ratio: f64,
) -> Result<Vec<usize>, ClassifierError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ClassifierError::InvalidTrainConfig(
            "split ratio must be in (0, 1)",
        ));
    }
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(ClassifierError::EmptyInput);
    }
    // Tolerance keeps e.g. 0.8 * 10 from flooring to 7.
    let floor = |x: f64| libm::floor(x + 1e-9) as usize;
    let n_train = floor(ratio * total as f64);

    let mut shares: Vec<(usize, f64)> = class_counts
        .iter()
        .map(|&c| {
            let exact = ratio * c as f64;
            let base = floor(exact).min(c);
            (base, exact - base as f64)
        })
        .collect();
    let assigned: usize = shares.iter().map(|s| s.0).sum();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| shares[b].1.total_cmp(&shares[a].1).then(a.cmp(&b)));
    for &i in order.iter().take(n_train.saturating_sub(assigned)) {
        shares[i].0 += 1;
    }
    Ok(shares.into_iter().map(|s| s.0).collect())
}

/// Partitions `dataset` into `(train, validation)` preserving class
/// proportions. Deterministic for a fixed `seed`.
pub fn stratified_split(
    dataset: &[TitleExample],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<TitleExample>, Vec<TitleExample>), ClassifierError> {
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, ex) in dataset.iter().enumerate() {
        by_class[ex.label as usize].push(i);
    }
    for (class, label) in [(0, Label::Fake), (1, Label::Real)] {
        if by_class[class].is_empty() {
            return Err(ClassifierError::MissingClass(label));
        }
    }
    let train_counts = stratified_split_counts(&[by_class[0].len(), by_class[1].len()], ratio)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let mut train = Vec::new();
    let mut validation = Vec::new();
    for (indices, n_train) in by_class.iter_mut().zip(train_counts) {
        indices.shuffle(&mut rng);
        let (tr, va) = indices.split_at(n_train);
        train.extend(tr.iter().map(|&i| dataset[i].clone()));
        validation.extend(va.iter().map(|&i| dataset[i].clone()));
    }
    Ok((train, validation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn dataset(fake: usize, real: usize) -> Vec<TitleExample> {
        (0..fake)
            .map(|i| TitleExample::new(format!("fake {i}"), Label::Fake).unwrap())
            .chain((0..real).map(|i| TitleExample::new(format!("real {i}"), Label::Real).unwrap()))
            .collect()
    }

    fn count(v: &[TitleExample], label: Label) -> usize {
        v.iter().filter(|e| e.label == label).count()
    }

    #[test]
    fn ten_and_ten() {
        let (tr, va) = stratified_split(&dataset(10, 10), 0.8, 1).unwrap();
        assert_eq!((count(&tr, Label::Fake), count(&tr, Label::Real)), (8, 8));
        assert_eq!((count(&va, Label::Fake), count(&va, Label::Real)), (2, 2));
    }

    #[test]
    fn five_and_five() {
        let (tr, va) = stratified_split(&dataset(5, 5), 0.8, 1).unwrap();
        assert_eq!((count(&tr, Label::Fake), count(&tr, Label::Real)), (4, 4));
        assert_eq!((count(&va, Label::Fake), count(&va, Label::Real)), (1, 1));
    }

    #[test]
    fn deterministic_for_seed() {
        let data = dataset(30, 17);
        assert_eq!(
            stratified_split(&data, 0.8, 9).unwrap(),
            stratified_split(&data, 0.8, 9).unwrap()
        );
        assert_ne!(
            stratified_split(&data, 0.8, 9).unwrap(),
            stratified_split(&data, 0.8, 10).unwrap()
        );
    }

    #[test]
    fn validation_supports_of_the_two_source_corpus() {
        // Fake/True title corpora of 23481 and 21417 rows.
        let train = stratified_split_counts(&[23481, 21417], 0.8).unwrap();
        assert_eq!((23481 - train[0], 21417 - train[1]), (4696, 4284));
    }

    #[test]
    fn missing_class_is_an_error() {
        assert_eq!(
            stratified_split(&dataset(4, 0), 0.8, 0),
            Err(ClassifierError::MissingClass(Label::Real))
        );
        assert!(stratified_split(&dataset(4, 4), 1.0, 0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn partition_and_proportions(fake in 1usize..60, real in 1usize..60,
                                     ratio in 0.05f64..0.95, seed in 0u64..1000) {
            let data = dataset(fake, real);
            let (tr, va) = stratified_split(&data, ratio, seed).unwrap();
            proptest::prop_assert_eq!(tr.len() + va.len(), data.len());
            let mut all: Vec<_> = tr.iter().chain(&va).map(|e| e.text.clone()).collect();
            all.sort();
            all.dedup();
            proptest::prop_assert_eq!(all.len(), data.len());
            for (label, n) in [(Label::Fake, fake), (Label::Real, real)] {
                let got = count(&tr, label) as f64;
                proptest::prop_assert!((got - ratio * n as f64).abs() <= 1.0 + 1e-9);
            }
        }
    }
}
