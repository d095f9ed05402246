use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Mask {
    Inline(u64),
    Wide(Box<[u64]>),
}

/// A subset of the sample points, stored as a bitmask over the space's point
/// ordering. Spaces with at most 64 points use a single inline word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event {
    len: usize,
    mask: Mask,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD).max(1)
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Event {
    fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        let n = words_for(len);
        words.resize(n, 0);
        if len == 0 {
            words[0] = 0;
        } else {
            words[n - 1] &= tail_mask(len);
        }
        let mask = if len <= WORD {
            Mask::Inline(words[0])
        } else {
            Mask::Wide(words.into_boxed_slice())
        };
        Event { len, mask }
    }

    fn words(&self) -> &[u64] {
        match &self.mask {
            Mask::Inline(w) => std::slice::from_ref(w),
            Mask::Wide(ws) => ws,
        }
    }

    fn zip_with(&self, other: &Event, f: impl Fn(u64, u64) -> u64) -> Event {
        assert_eq!(self.len, other.len, "events belong to different spaces");
        let words = self
            .words()
            .iter()
            .zip(other.words())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Event::from_words(self.len, words)
    }

    pub fn empty(len: usize) -> Self {
        Event::from_words(len, Vec::new())
    }

    pub fn full(len: usize) -> Self {
        Event::from_words(len, vec![u64::MAX; words_for(len)])
    }

    /// Builds an event from point indices. Panics on an index outside the space.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for i in indices {
            assert!(i < len, "point index {i} out of range for {len} points");
            words[i / WORD] |= 1u64 << (i % WORD);
        }
        Event::from_words(len, words)
    }

    pub fn singleton(len: usize, index: usize) -> Self {
        Event::from_indices(len, [index])
    }

    /// Number of points in the underlying space.
    pub fn space_len(&self) -> usize {
        self.len
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.len && self.words()[index / WORD] & (1u64 << (index % WORD)) != 0
    }

    pub fn count(&self) -> usize {
        self.words().iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words().iter().all(|&w| w == 0)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }

    pub fn intersection(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Event) -> Event {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Event {
        Event::full(self.len).difference(self)
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.intersection(other).is_empty()
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}
