//! Validated single-channel detector time-tag streams.
//!
//! A [`TagStream`] is the in-memory form of one detector channel's click
//! record: strictly increasing timestamps on a 1 ps integer grid, together
//! with the acquisition duration that normalizations divide by. All
//! correlator and generator APIs exchange this type, so the sortedness and
//! range invariants are established exactly once, at construction.

use rand::Rng;

use crate::error::{Error, Result};

/// Picoseconds per second.
pub const PS_PER_S: f64 = 1e12;

/// Sorted detector click timestamps on one channel, integer picoseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagStream {
    channel: u8,
    tags: Vec<i64>,
    duration_ps: i64,
}

impl TagStream {
    /// Build a stream, validating: timestamps non-negative, strictly
    /// increasing, and within `[0, duration_ps]`.
    pub fn new(channel: u8, tags: Vec<i64>, duration_ps: i64) -> Result<Self> {
        if duration_ps < 0 {
            return Err(Error::InvalidInput(format!(
                "duration must be non-negative, got {duration_ps} ps"
            )));
        }
        if let Some(&first) = tags.first() {
            if first < 0 {
                return Err(Error::InvalidInput(format!(
                    "negative timestamp {first} ps at index 0"
                )));
            }
        }
        if let Some(i) = tags.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedInput { index: i + 1 });
        }
        if let Some(&last) = tags.last() {
            if last > duration_ps {
                return Err(Error::InvalidInput(format!(
                    "last timestamp {last} ps exceeds duration {duration_ps} ps"
                )));
            }
        }
        Ok(TagStream {
            channel,
            tags,
            duration_ps,
        })
    }

    /// Internal constructor for callers that have already established the
    /// invariants (file readers, generators).
    pub(crate) fn from_raw_unchecked(channel: u8, tags: Vec<i64>, duration_ps: i64) -> Self {
        debug_assert!(tags.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(tags.first().map_or(true, |&t| t >= 0));
        debug_assert!(tags.last().map_or(true, |&t| t <= duration_ps));
        TagStream {
            channel,
            tags,
            duration_ps,
        }
    }

    /// Quantize floating-point arrival times (seconds) onto the 1 ps grid.
    ///
    /// Rounding can merge two arrivals into one grid point; collisions are
    /// resolved by shifting the later tag up by 1 ps (repeatedly if needed).
    /// A tag pushed past the end of the acquisition window by that shift is
    /// dropped.
    pub fn from_seconds(channel: u8, times_s: &[f64], duration_s: f64) -> Result<Self> {
        if !(duration_s >= 0.0) || !duration_s.is_finite() {
            return Err(Error::InvalidInput(format!(
                "duration must be finite and non-negative, got {duration_s}"
            )));
        }
        let duration_ps = (duration_s * PS_PER_S).round() as i64;
        let mut tags = Vec::with_capacity(times_s.len());
        let mut prev = i64::MIN;
        for (i, &t) in times_s.iter().enumerate() {
            if !t.is_finite() || t < 0.0 || t > duration_s {
                return Err(Error::InvalidInput(format!(
                    "arrival time {t} s at index {i} outside [0, {duration_s}]"
                )));
            }
            let mut ps = (t * PS_PER_S).round() as i64;
            if ps <= prev {
                ps = prev + 1;
                if ps > duration_ps {
                    continue;
                }
            }
            tags.push(ps);
            prev = ps;
        }
        Ok(TagStream {
            channel,
            tags,
            duration_ps,
        })
    }

    pub fn channel(&self) -> u8 {
        self.channel
    }

    pub fn tags(&self) -> &[i64] {
        &self.tags
    }

    pub fn duration_ps(&self) -> i64 {
        self.duration_ps
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_ps as f64 / PS_PER_S
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Mean singles rate; 0 for a zero-duration stream.
    pub fn rate_hz(&self) -> f64 {
        if self.duration_ps == 0 {
            0.0
        } else {
            self.tags.len() as f64 / self.duration_s()
        }
    }

    /// Route each tag to one of two output channels with probability `p`
    /// for the first — a balanced splitter in front of two detectors when
    /// `p = 0.5`. Both outputs keep the full acquisition duration.
    pub fn split_bernoulli(
        &self,
        p: f64,
        channels: (u8, u8),
        rng: &mut impl Rng,
    ) -> Result<(TagStream, TagStream)> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidInput(format!(
                "split probability must lie in [0, 1], got {p}"
            )));
        }
        let mut first = Vec::new();
        let mut second = Vec::new();
        for &t in &self.tags {
            if rng.gen::<f64>() < p {
                first.push(t);
            } else {
                second.push(t);
            }
        }
        Ok((
            TagStream::from_raw_unchecked(channels.0, first, self.duration_ps),
            TagStream::from_raw_unchecked(channels.1, second, self.duration_ps),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_validates() {
        assert!(TagStream::new(0, vec![0, 5, 9], 10).is_ok());
        assert!(TagStream::new(0, vec![], 0).is_ok());
        assert!(TagStream::new(0, vec![10], 10).is_ok());
        assert!(matches!(
            TagStream::new(0, vec![3, 3], 10),
            Err(Error::UnsortedInput { index: 1 })
        ));
        assert!(matches!(
            TagStream::new(0, vec![5, 2, 8], 10),
            Err(Error::UnsortedInput { index: 1 })
        ));
        assert!(TagStream::new(0, vec![-1, 4], 10).is_err());
        assert!(TagStream::new(0, vec![4, 11], 10).is_err());
        assert!(TagStream::new(0, vec![], -1).is_err());
    }

    #[test]
    fn rate_and_duration() {
        let s = TagStream::new(3, vec![0, 250_000_000_000, 999_999_999_999], 2_000_000_000_000)
            .unwrap();
        assert_eq!(s.channel(), 3);
        assert_eq!(s.len(), 3);
        assert_eq!(s.duration_s(), 2.0);
        assert_eq!(s.rate_hz(), 1.5);
        assert_eq!(TagStream::new(0, vec![], 0).unwrap().rate_hz(), 0.0);
    }

    #[test]
    fn from_seconds_quantizes_and_bumps_collisions() {
        let s = TagStream::from_seconds(1, &[0.0, 1.0e-12, 1.4e-12, 5.0e-12], 1e-9).unwrap();
        // 0 ps, 1 ps, then 1.4 ps rounds to 1 ps -> bumped to 2 ps, 5 ps
        assert_eq!(s.tags(), &[0, 1, 2, 5]);
        assert_eq!(s.duration_ps(), 1000);
    }

    #[test]
    fn from_seconds_drops_tags_bumped_past_duration() {
        let s = TagStream::from_seconds(0, &[0.9e-12, 1.0e-12], 1e-12).unwrap();
        // both round to 1 ps; the second would be bumped to 2 ps > duration
        assert_eq!(s.tags(), &[1]);
    }

    #[test]
    fn from_seconds_rejects_out_of_range() {
        assert!(TagStream::from_seconds(0, &[-1e-12], 1.0).is_err());
        assert!(TagStream::from_seconds(0, &[2.0], 1.0).is_err());
        assert!(TagStream::from_seconds(0, &[f64::NAN], 1.0).is_err());
        assert!(TagStream::from_seconds(0, &[], f64::INFINITY).is_err());
    }

    #[test]
    fn split_partitions_every_tag() {
        let tags: Vec<i64> = (0..10_000).map(|i| i * 97 + 3).collect();
        let s = TagStream::new(0, tags.clone(), 1_000_000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (x, y) = s.split_bernoulli(0.5, (0, 1), &mut rng).unwrap();
        assert_eq!(x.channel(), 0);
        assert_eq!(y.channel(), 1);
        assert_eq!(x.len() + y.len(), s.len());
        let mut merged: Vec<i64> = x.tags().iter().chain(y.tags()).copied().collect();
        merged.sort_unstable();
        assert_eq!(merged, tags);
        // balanced to well within 5 sigma (sigma = sqrt(n)/2 = 50)
        assert!((x.len() as f64 - 5000.0).abs() < 250.0, "{}", x.len());
        assert_eq!(x.duration_ps(), s.duration_ps());
    }

    #[test]
    fn split_probability_validated() {
        let s = TagStream::new(0, vec![1, 2], 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(s.split_bernoulli(1.5, (0, 1), &mut rng).is_err());
    }
}
