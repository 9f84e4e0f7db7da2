//! Binary min-heap addressed by dense integer handles.
//!
//! Each handle holds at most one key; `set` inserts or re-keys in place and
//! `remove` drops a handle from anywhere in the heap.

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone, Default)]
pub struct IndexedMinHeap<K> {
    heap: Vec<(K, usize)>,
    pos: Vec<usize>,
}

impl<K: Ord + Copy> IndexedMinHeap<K> {
    pub fn new() -> Self {
        Self { heap: Vec::new(), pos: Vec::new() }
    }

    pub fn with_handles(n: usize) -> Self {
        Self { heap: Vec::with_capacity(n), pos: vec![ABSENT; n] }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Empties the heap, keeping allocations.
    pub fn clear(&mut self) {
        for &(_, h) in &self.heap {
            self.pos[h] = ABSENT;
        }
        self.heap.clear();
    }

    pub fn contains(&self, handle: usize) -> bool {
        self.pos.get(handle).is_some_and(|&p| p != ABSENT)
    }

    pub fn key(&self, handle: usize) -> Option<K> {
        let p = *self.pos.get(handle)?;
        (p != ABSENT).then(|| self.heap[p].0)
    }

    pub fn peek(&self) -> Option<(K, usize)> {
        self.heap.first().copied()
    }

    pub fn pop(&mut self) -> Option<(K, usize)> {
        let top = *self.heap.first()?;
        self.remove(top.1);
        Some(top)
    }

    pub fn set(&mut self, handle: usize, key: K) {
        if handle >= self.pos.len() {
            self.pos.resize(handle + 1, ABSENT);
        }
        match self.pos[handle] {
            ABSENT => {
                self.heap.push((key, handle));
                self.pos[handle] = self.heap.len() - 1;
                self.sift_up(self.heap.len() - 1);
            }
            p => {
                let old = self.heap[p].0;
                self.heap[p].0 = key;
                if key < old {
                    self.sift_up(p);
                } else {
                    self.sift_down(p);
                }
            }
        }
    }

    /// Lowers the key of `handle` (inserting it if absent); larger keys are ignored.
    pub fn decrease(&mut self, handle: usize, key: K) -> bool {
        match self.key(handle) {
            Some(old) if old <= key => false,
            _ => {
                self.set(handle, key);
                true
            }
        }
    }

    pub fn remove(&mut self, handle: usize) -> Option<K> {
        let p = *self.pos.get(handle)?;
        if p == ABSENT {
            return None;
        }
        let key = self.heap[p].0;
        let last = self.heap.len() - 1;
        self.swap(p, last);
        self.heap.pop();
        self.pos[handle] = ABSENT;
        if p < self.heap.len() {
            self.sift_down(p);
            self.sift_up(p);
        }
        Some(key)
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].1] = a;
        self.pos[self.heap[b].1] = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.heap[i].0 < self.heap[parent].0 {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && self.heap[r].0 < self.heap[l].0 { r } else { l };
            if self.heap[c].0 < self.heap[i].0 {
                self.swap(i, c);
                i = c;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[derive(Debug, Clone)]
    enum Op {
        Set(usize, i32),
        Remove(usize),
        Pop,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0usize..16, -50i32..50).prop_map(|(h, k)| Op::Set(h, k)),
            (0usize..16).prop_map(Op::Remove),
            Just(Op::Pop),
        ]
    }

    proptest! {
        #[test]
        fn matches_ordered_map(ops in proptest::collection::vec(op(), 0..200)) {
            let mut heap = IndexedMinHeap::new();
            let mut model: BTreeMap<usize, i32> = BTreeMap::new();
            for op in ops {
                match op {
                    Op::Set(h, k) => { heap.set(h, (k, h)); model.insert(h, k); }
                    Op::Remove(h) => {
                        prop_assert_eq!(heap.remove(h).map(|k| k.0), model.remove(&h));
                    }
                    Op::Pop => {
                        let expect = model.iter().map(|(&h, &k)| (k, h)).min();
                        let got = heap.pop().map(|(k, _)| k);
                        prop_assert_eq!(got, expect);
                        if let Some((_, h)) = expect { model.remove(&h); }
                    }
                }
                prop_assert_eq!(heap.len(), model.len());
            }
        }
    }

    #[test]
    fn decrease_ignores_larger_keys() {
        let mut heap = IndexedMinHeap::with_handles(4);
        assert!(heap.decrease(2, 10));
        assert!(!heap.decrease(2, 12));
        assert!(heap.decrease(2, 3));
        assert_eq!(heap.peek(), Some((3, 2)));
        heap.clear();
        assert!(heap.is_empty());
        assert!(!heap.contains(2));
    }
}
