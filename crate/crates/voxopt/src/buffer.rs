//! Bounded FIFO store of (design, payoff) experience.

use std::collections::VecDeque;

use rand::Rng;

use crate::design::Design;
use crate::error::VoxError;

/// Experience dataset with FIFO eviction beyond `capacity`.
#[derive(Debug, Clone)]
pub struct ExperienceBuffer {
    capacity: usize,
    entries: VecDeque<(Design, f64)>,
}

impl ExperienceBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity.min(4096)),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Inserts an entry, evicting the oldest one when full.
    pub fn push(&mut self, design: Design, payoff: f64) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((design, payoff));
    }

    /// Entries in insertion order, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &(Design, f64)> {
        self.entries.iter()
    }

    /// Draws `batch` entries uniformly with replacement.
    pub fn sample<'a, R: Rng>(
        &'a self,
        batch: usize,
        rng: &mut R,
    ) -> Result<Vec<&'a (Design, f64)>, VoxError> {
        if self.entries.is_empty() {
            return Err(VoxError::EmptyBuffer);
        }
        Ok((0..batch)
            .map(|_| &self.entries[rng.random_range(0..self.entries.len())])
            .collect())
    }
}
