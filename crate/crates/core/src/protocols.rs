//! Relay selection rules and the noise-set rule.

use rand::Rng;
use thiserror::Error;

use crate::channel::ChannelGain;
use crate::scenario::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("need at least 2 candidate relays, got {0}")]
    TooFewRelays(usize),
    #[error("gain lists differ in length ({source_len} vs {dest_len})")]
    LengthMismatch { source_len: usize, dest_len: usize },
}

/// Outcome of relay selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelayChoice {
    Selected(usize),
    /// No relay lies inside the selection region.
    Unavailable,
}

impl RelayChoice {
    pub fn index(self) -> Option<usize> {
        match self {
            RelayChoice::Selected(j) => Some(j),
            RelayChoice::Unavailable => None,
        }
    }
}

/// Relays that transmit noise during one hop. Members are sorted and never
/// include the selected relay.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NoiseSet {
    members: Vec<usize>,
}

impl NoiseSet {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

/// Argmax over relays of min(source gain, destination gain). Ties go to the
/// lowest index.
pub fn select_relay_optimal(
    gains_to_source: &[ChannelGain],
    gains_to_dest: &[ChannelGain],
) -> Result<RelayChoice, ProtocolError> {
    if gains_to_source.len() != gains_to_dest.len() {
        return Err(ProtocolError::LengthMismatch {
            source_len: gains_to_source.len(),
            dest_len: gains_to_dest.len(),
        });
    }
    if gains_to_source.len() < 2 {
        return Err(ProtocolError::TooFewRelays(gains_to_source.len()));
    }
    let mut best = 0;
    let mut best_min = f64::NEG_INFINITY;
    for (j, (s, d)) in gains_to_source.iter().zip(gains_to_dest).enumerate() {
        let link = s.value().min(d.value());
        if link > best_min {
            best = j;
            best_min = link;
        }
    }
    Ok(RelayChoice::Selected(best))
}

/// Uniform choice among `n` relays.
pub fn select_relay_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RelayChoice, ProtocolError> {
    if n < 2 {
        return Err(ProtocolError::TooFewRelays(n));
    }
    Ok(RelayChoice::Selected(rng.gen_range(0..n)))
}

/// Whether `p` lies in the closed rectangle `[a, 1−a] × [b, 1−b]`.
pub fn in_selection_region(p: Point, a: f64, b: f64) -> bool {
    p.x >= a && p.x <= 1.0 - a && p.y >= b && p.y <= 1.0 - b
}

/// Uniform choice among relays inside the selection region.
pub fn select_relay_region<R: Rng + ?Sized>(positions: &[Point], a: f64, b: f64, rng: &mut R) -> RelayChoice {
    let eligible: Vec<usize> = positions
        .iter()
        .enumerate()
        .filter(|(_, p)| in_selection_region(**p, a, b))
        .map(|(j, _)| j)
        .collect();
    if eligible.is_empty() {
        return RelayChoice::Unavailable;
    }
    RelayChoice::Selected(eligible[rng.gen_range(0..eligible.len())])
}

/// `{ j ≠ exclude : gains_to_target[j] < τ }`.
pub fn noise_set(gains_to_target: &[ChannelGain], tau: f64, exclude: usize) -> NoiseSet {
    let members = gains_to_target
        .iter()
        .enumerate()
        .filter(|&(j, g)| j != exclude && g.value() < tau)
        .map(|(j, _)| j)
        .collect();
    NoiseSet { members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gains(v: &[f64]) -> Vec<ChannelGain> {
        v.iter().map(|&x| ChannelGain::new(x).unwrap()).collect()
    }

    #[test]
    fn optimal_examples() {
        let s = gains(&[0.2, 0.9, 0.4]);
        let d = gains(&[0.8, 0.7, 0.3]);
        assert_eq!(select_relay_optimal(&s, &d), Ok(RelayChoice::Selected(1)));
        let flat = gains(&[0.5; 4]);
        assert_eq!(select_relay_optimal(&flat, &flat), Ok(RelayChoice::Selected(0)));
        let s = gains(&[0.5, 0.5000001]);
        assert_eq!(select_relay_optimal(&s, &s), Ok(RelayChoice::Selected(1)));
    }

    #[test]
    fn optimal_errors() {
        let two = gains(&[0.1, 0.2]);
        let three = gains(&[0.1, 0.2, 0.3]);
        assert!(matches!(
            select_relay_optimal(&two, &three),
            Err(ProtocolError::LengthMismatch { .. })
        ));
        let one = gains(&[0.1]);
        assert_eq!(select_relay_optimal(&one, &one), Err(ProtocolError::TooFewRelays(1)));
    }

    #[test]
    fn random_support_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let j = select_relay_random(2, &mut rng).unwrap().index().unwrap();
            assert!(j < 2);
        }
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(select_relay_random(10, &mut a), select_relay_random(10, &mut b));
        }
        assert_eq!(select_relay_random(1, &mut a), Err(ProtocolError::TooFewRelays(1)));
    }

    #[test]
    fn random_is_uniform() {
        // chi-square with 9 dof; 27.88 is the 0.999 quantile
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 1_000_000;
        let mut counts = [0usize; 10];
        for _ in 0..draws {
            counts[select_relay_random(10, &mut rng).unwrap().index().unwrap()] += 1;
        }
        let expected = draws as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 27.88, "chi2 = {chi2}");
        for c in counts {
            assert!((c as f64 / draws as f64 - 0.1).abs() < 0.002);
        }
    }

    #[test]
    fn region_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let corner = vec![Point { x: 0.01, y: 0.01 }; 5];
        assert_eq!(select_relay_region(&corner, 0.25, 0.25, &mut rng), RelayChoice::Unavailable);
        let centre = [Point { x: 0.5, y: 0.5 }];
        assert_eq!(select_relay_region(&centre, 0.25, 0.25, &mut rng), RelayChoice::Selected(0));
        // closed boundaries qualify
        let edge = [Point { x: 0.25, y: 0.75 }];
        assert_eq!(select_relay_region(&edge, 0.25, 0.25, &mut rng), RelayChoice::Selected(0));
    }

    #[test]
    fn full_region_reduces_to_random_selection() {
        let positions: Vec<Point> = (0..8)
            .map(|i| Point {
                x: i as f64 / 8.0,
                y: 1.0 - i as f64 / 8.0,
            })
            .collect();
        let mut a = ChaCha8Rng::seed_from_u64(21);
        let mut b = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            assert_eq!(
                select_relay_region(&positions, 0.0, 0.0, &mut a),
                select_relay_random(positions.len(), &mut b).unwrap()
            );
        }
    }

    #[test]
    fn noise_set_examples() {
        let g = gains(&[0.1, 0.5, 0.9]);
        assert_eq!(noise_set(&g, 0.6, 2).members(), &[0, 1]);
        assert!(noise_set(&g, 0.0, 2).is_empty());
        let g = gains(&[0.3, 0.3]);
        assert!(noise_set(&g, 0.3, 0).is_empty());
        let g = gains(&[0.0, 0.0, 0.0]);
        let set = noise_set(&g, 1.0, 1);
        assert_eq!(set.members(), &[0, 2]);
        assert!(!set.contains(1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn optimal_invariant_under_monotone_transform(
                raw in proptest::collection::vec((0.0f64..5.0, 0.0f64..5.0), 2..40),
                scale in 0.1f64..10.0, shift in 0.0f64..3.0,
            ) {
                let s: Vec<_> = raw.iter().map(|p| ChannelGain::new(p.0).unwrap()).collect();
                let d: Vec<_> = raw.iter().map(|p| ChannelGain::new(p.1).unwrap()).collect();
                let f = |g: &ChannelGain| ChannelGain::new((g.value() * scale + shift).sqrt()).unwrap();
                let s2: Vec<_> = s.iter().map(f).collect();
                let d2: Vec<_> = d.iter().map(f).collect();
                prop_assert_eq!(select_relay_optimal(&s, &d), select_relay_optimal(&s2, &d2));
            }

            #[test]
            fn noise_set_never_holds_excluded(
                raw in proptest::collection::vec(0.0f64..3.0, 2..40),
                tau in 0.0f64..3.0, pick in 0usize..40,
            ) {
                let g: Vec<_> = raw.iter().map(|&x| ChannelGain::new(x).unwrap()).collect();
                let exclude = pick % g.len();
                let set = noise_set(&g, tau, exclude);
                prop_assert!(!set.contains(exclude));
                for j in set.iter() {
                    prop_assert!(j < g.len());
                    prop_assert!(g[j].value() < tau);
                }
            }
        }
    }
}
