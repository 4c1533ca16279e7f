use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::rng::{keyed_rng, Stream};
use crate::spin::Spin;

/// Rate-one Poisson clocks with one fair coin per ring, one clock per vertex.
///
/// The clock of vertex `v` is the sub-stream keyed by `keys[v]`, so a
/// subgraph run can reuse exactly the rings a vertex would see in the full
/// graph by carrying over its key. Within a clock the draws alternate
/// gap, coin, gap, coin, ...; the k-th coin belongs to the k-th ring whether
/// or not it ends up being used.
#[derive(Clone, Debug)]
pub struct EventStream {
    seed: u64,
    keys: Vec<u64>,
}

impl EventStream {
    pub fn new(seed: u64, n: usize) -> Self {
        EventStream { seed, keys: (0..n as u64).collect() }
    }

    pub fn with_keys(seed: u64, keys: Vec<u64>) -> Self {
        EventStream { seed, keys }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Stream for the subgraph on `vertices` (listed in subgraph order).
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        EventStream { seed: self.seed, keys: vertices.iter().map(|&v| self.keys[v]).collect() }
    }

    /// Ring iterator over the vertices with `active[v]`.
    pub fn rings(&self, active: &[bool], horizon: f64) -> Rings {
        let mut clocks: Vec<Option<ChaCha8Rng>> = vec![None; self.keys.len()];
        let mut heap = BinaryHeap::new();
        for (v, &on) in active.iter().enumerate() {
            if on {
                let mut rng = keyed_rng(self.seed, Stream::Clocks, self.keys[v]);
                let t: f64 = Exp1.sample(&mut rng);
                if t <= horizon {
                    heap.push(Reverse((t.to_bits(), v)));
                }
                clocks[v] = Some(rng);
            }
        }
        Rings { clocks, heap, horizon }
    }
}

/// Global time-ordered merge of the per-vertex clocks.
pub struct Rings {
    clocks: Vec<Option<ChaCha8Rng>>,
    // positive f64 bit patterns sort like the numbers they encode
    heap: BinaryHeap<Reverse<(u64, usize)>>,
    horizon: f64,
}

/// One ring: time, vertex, coin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ring {
    pub time: f64,
    pub vertex: usize,
    pub coin: Spin,
}

impl Iterator for Rings {
    type Item = Ring;

    fn next(&mut self) -> Option<Ring> {
        let Reverse((bits, v)) = self.heap.pop()?;
        let time = f64::from_bits(bits);
        let rng = self.clocks[v].as_mut().expect("active clock");
        let coin = if rng.gen::<bool>() { 1 } else { -1 };
        let gap: f64 = Exp1.sample(rng);
        let next = time + gap;
        if next <= self.horizon {
            self.heap.push(Reverse((next.to_bits(), v)));
        }
        Some(Ring { time, vertex: v, coin })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rings_are_ordered_and_reproducible() {
        let s = EventStream::new(11, 20);
        let active = vec![true; 20];
        let a: Vec<Ring> = s.rings(&active, 50.0).collect();
        let b: Vec<Ring> = s.rings(&active, 50.0).collect();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].time < w[1].time));
        assert!(a.iter().all(|r| r.time > 0.0 && r.time <= 50.0));
        // about 20 * 50 rings at rate one
        assert!((800..1200).contains(&a.len()), "{}", a.len());
    }

    #[test]
    fn restriction_keeps_each_clock() {
        let s = EventStream::new(3, 10);
        let full: Vec<Ring> = s.rings(&[true; 10], 20.0).filter(|r| r.vertex == 7).collect();
        let sub = s.restrict(&[7, 2]);
        let part: Vec<Ring> = sub.rings(&[true, false], 20.0).collect();
        assert_eq!(full.len(), part.len());
        for (f, p) in full.iter().zip(&part) {
            assert_eq!((f.time, f.coin), (p.time, p.coin));
            assert_eq!(p.vertex, 0);
        }
    }

    #[test]
    fn horizon_prefix_property() {
        let s = EventStream::new(5, 4);
        let long: Vec<Ring> = s.rings(&[true; 4], 30.0).collect();
        let short: Vec<Ring> = s.rings(&[true; 4], 10.0).collect();
        assert_eq!(&long[..short.len()], &short[..]);
        assert!(long[short.len()].time > 10.0);
    }
}
