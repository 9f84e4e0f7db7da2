//! Minimum tracking over a family of unimodal functions on `[1, N]` whose
//! pointwise minimum is certified by the lower envelope of lines.
//!
//! Every inserted function `f_i` comes with its valley index `gamma_i` and a
//! line `g_i(x) = slope * x + intercept` such that `f_i(x)` is minimal among
//! the inserted functions exactly where `g_i(x)` is minimal among the lines.
//! The structure keeps the lines that own at least one integer point of the
//! envelope, ordered by decreasing slope, each with its interval `[lo, hi]`.
//! Inside an interval the owning function is the minimum, so the best live
//! point of the interval is the live point nearest to `gamma_i` from the left
//! (pointer `p`, moving left) or from the right (pointer `q`, moving right).
//! Both candidates of every line sit in one indexed heap.
//!
//! Points removed by [`EnvelopeHeap::delete_min`] are skipped by the pointers
//! through two union-find "next live point" maps, so a run of consecutive
//! deleted points costs amortized near-constant time.

use crate::heap::IndexedMinHeap;

/// Caller-chosen function identifier.
pub type FuncId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Line {
    pub slope: i64,
    pub intercept: i64,
}

impl Line {
    pub fn new(slope: i64, intercept: i64) -> Self {
        Self { slope, intercept }
    }

    pub fn at(&self, x: usize) -> i128 {
        i128::from(self.slope) * x as i128 + i128::from(self.intercept)
    }
}

/// Last integer point owned by `left` when `right` follows it on the envelope.
///
/// Requires `left.slope > right.slope`. Ties go to the left line.
fn breakpoint(left: &Line, right: &Line) -> i128 {
    match (right.intercept.checked_sub(left.intercept), left.slope.checked_sub(right.slope)) {
        (Some(num), Some(den)) => i128::from(num.div_euclid(den)),
        _ => {
            let num = i128::from(right.intercept) - i128::from(left.intercept);
            let den = i128::from(left.slope) - i128::from(right.slope);
            num.div_euclid(den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeFunction {
    pub id: FuncId,
    pub line: Line,
    /// Valley index in `[1, N]`.
    pub gamma: usize,
}

/// Evaluates `f_i(x)` for an inserted function.
pub trait FunctionOracle {
    fn eval(&self, func: &EnvelopeFunction, x: usize) -> i64;
}

impl<F: Fn(&EnvelopeFunction, usize) -> i64> FunctionOracle for F {
    fn eval(&self, func: &EnvelopeFunction, x: usize) -> i64 {
        self(func, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinEntry {
    pub index: usize,
    pub value: i64,
    pub func: FuncId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnvelopeStats {
    pub inserts: usize,
    pub deletes: usize,
    pub evictions: usize,
    pub dominated_inserts: usize,
    pub pointer_updates: usize,
}

#[derive(Debug, Clone)]
struct LineState {
    func: EnvelopeFunction,
    active: bool,
    lo: usize,
    hi: usize,
    /// Best live point left of the valley; below `lo` when exhausted.
    p: usize,
    /// Best live point right of the valley; above `hi` when exhausted.
    q: usize,
}

/// Union-find over `0..=N+1` returning the nearest live point in one direction.
#[derive(Debug, Clone, Default)]
struct LiveMap {
    next: Vec<usize>,
}

impl LiveMap {
    fn reset(&mut self, len: usize) {
        self.next.clear();
        self.next.extend(0..len);
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.next[root] != root {
            root = self.next[root];
        }
        let mut cur = x;
        while self.next[cur] != root {
            let nxt = self.next[cur];
            self.next[cur] = root;
            cur = nxt;
        }
        root
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnvelopeHeap {
    domain: usize,
    lines: Vec<LineState>,
    /// Active line slots by strictly decreasing slope.
    active: Vec<usize>,
    deleted: Vec<bool>,
    live_left: LiveMap,
    live_right: LiveMap,
    live_count: usize,
    candidates: IndexedMinHeap<(i64, usize, usize)>,
    stats: EnvelopeStats,
}

impl EnvelopeHeap {
    pub fn new(domain: usize) -> Self {
        let mut h = Self::default();
        h.reset(domain);
        h
    }

    /// Empties the structure and sets the domain to `[1, domain]`.
    pub fn reset(&mut self, domain: usize) {
        self.domain = domain;
        self.lines.clear();
        self.active.clear();
        self.deleted.clear();
        self.deleted.resize(domain + 2, false);
        self.live_left.reset(domain + 2);
        self.live_right.reset(domain + 2);
        self.live_count = domain;
        self.candidates.clear();
        self.stats = EnvelopeStats::default();
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn num_inserted(&self) -> usize {
        self.lines.len()
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn is_deleted(&self, x: usize) -> bool {
        self.deleted[x]
    }

    pub fn stats(&self) -> EnvelopeStats {
        self.stats
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Every function inserted so far, in insertion order.
    pub fn functions(&self) -> impl Iterator<Item = &EnvelopeFunction> {
        self.lines.iter().map(|l| &l.func)
    }

    /// `(function id, lo, hi)` of every line owning envelope points, by decreasing slope.
    pub fn intervals(&self) -> Vec<(FuncId, usize, usize)> {
        self.active
            .iter()
            .map(|&s| (self.lines[s].func.id, self.lines[s].lo, self.lines[s].hi))
            .collect()
    }

    /// `(function id, p, q)` for every inserted line; `None` marks an exhausted side.
    pub fn pointers(&self) -> Vec<(FuncId, Option<usize>, Option<usize>)> {
        self.lines
            .iter()
            .map(|l| {
                let p = (l.active && l.p >= l.lo).then_some(l.p);
                let q = (l.active && l.q <= l.hi).then_some(l.q);
                (l.func.id, p, q)
            })
            .collect()
    }

    pub fn access_min(&self) -> Option<MinEntry> {
        let ((value, index, slot), _) = self.candidates.peek()?;
        Some(MinEntry { index, value, func: self.lines[slot].func.id })
    }

    pub fn delete_min<O: FunctionOracle>(&mut self, oracle: &O) -> Option<MinEntry> {
        let ((value, index, slot), handle) = self.candidates.pop()?;
        self.stats.deletes += 1;
        self.mark_deleted(index);
        if handle % 2 == 0 {
            self.lines[slot].p = self.live_left.find(index - 1);
            self.refresh_left(slot, oracle);
        } else {
            self.lines[slot].q = self.live_right.find(index + 1);
            self.refresh_right(slot, oracle);
        }
        Some(MinEntry { index, value, func: self.lines[slot].func.id })
    }

    pub fn insert<O: FunctionOracle>(&mut self, func: EnvelopeFunction, oracle: &O) {
        debug_assert!(self.domain == 0 || (1..=self.domain).contains(&func.gamma));
        self.stats.inserts += 1;
        let slot = self.lines.len();
        self.lines.push(LineState { func, active: false, lo: 1, hi: 0, p: 0, q: 0 });
        if self.domain == 0 {
            self.stats.dominated_inserts += 1;
            return;
        }
        let mut at = match self.locate(func.line.slope) {
            Ok(i) => {
                let same = self.active[i];
                if self.lines[same].func.line.intercept <= func.line.intercept {
                    self.stats.dominated_inserts += 1;
                    return;
                }
                self.evict_at(i);
                i
            }
            Err(i) => i,
        };
        let mut pred = at.checked_sub(1).map(|j| self.active[j]);
        let mut succ = self.active.get(at).copied();
        let (lo, hi) = self.territory(pred, &func.line, succ);
        if lo > hi {
            self.stats.dominated_inserts += 1;
            return;
        }
        self.lines[slot].active = true;

        // `slot` goes between positions at-1 and at; drop neighbours it covers.
        while let Some(p) = pred {
            let pp = at.checked_sub(2).map(|j| self.active[j]);
            let (plo, phi) = self.territory(pp, &self.lines[p].func.line, Some(slot));
            if plo <= phi {
                break;
            }
            self.evict_at(at - 1);
            at -= 1;
            pred = pp;
        }
        while let Some(s) = succ {
            let ss = self.active.get(at + 1).copied();
            let (slo, shi) = self.territory(Some(slot), &self.lines[s].func.line, ss);
            if slo <= shi {
                break;
            }
            self.evict_at(at);
            succ = ss;
        }
        self.active.insert(at, slot);

        let (lo, hi) = self.territory(pred, &func.line, succ);
        let line = &mut self.lines[slot];
        line.lo = lo;
        line.hi = hi;
        line.p = self.live_left.find(func.gamma.min(hi));
        line.q = self.live_right.find((func.gamma + 1).max(lo));
        self.stats.pointer_updates += 2;
        self.refresh_left(slot, oracle);
        self.refresh_right(slot, oracle);

        if let Some(p) = pred {
            let hi = self.lines[p].hi.min(lo - 1);
            self.lines[p].hi = hi;
            if self.lines[p].p > hi {
                self.lines[p].p = self.live_left.find(hi);
                self.stats.pointer_updates += 1;
                self.refresh_left(p, oracle);
            }
            if self.lines[p].q > hi {
                self.refresh_right(p, oracle);
            }
        }
        if let Some(s) = succ {
            let lo = self.lines[s].lo.max(hi + 1);
            self.lines[s].lo = lo;
            if self.lines[s].q < lo {
                self.lines[s].q = self.live_right.find(lo);
                self.stats.pointer_updates += 1;
                self.refresh_right(s, oracle);
            }
            if self.lines[s].p < lo {
                self.refresh_left(s, oracle);
            }
        }
    }

    /// Position of `slope` in `active`, or where it would be inserted.
    fn locate(&self, slope: i64) -> Result<usize, usize> {
        self.active.binary_search_by(|&s| slope.cmp(&self.lines[s].func.line.slope))
    }

    /// Integer points of `[1, N]` owned by `line` between envelope neighbours.
    fn territory(&self, pred: Option<usize>, line: &Line, succ: Option<usize>) -> (usize, usize) {
        let n = self.domain as i128;
        let lo = pred.map_or(1, |p| breakpoint(&self.lines[p].func.line, line) + 1).max(1);
        let hi = succ.map_or(n, |s| breakpoint(line, &self.lines[s].func.line)).min(n);
        if lo > hi {
            (1, 0)
        } else {
            (lo as usize, hi as usize)
        }
    }

    fn evict_at(&mut self, i: usize) {
        let slot = self.active.remove(i);
        self.candidates.remove(2 * slot);
        self.candidates.remove(2 * slot + 1);
        let line = &mut self.lines[slot];
        line.active = false;
        line.lo = 1;
        line.hi = 0;
        self.stats.evictions += 1;
    }

    fn mark_deleted(&mut self, x: usize) {
        debug_assert!(!self.deleted[x]);
        self.deleted[x] = true;
        self.live_count -= 1;
        self.live_left.next[x] = x - 1;
        self.live_right.next[x] = x + 1;
    }

    fn refresh_left<O: FunctionOracle>(&mut self, slot: usize, oracle: &O) {
        let line = &self.lines[slot];
        if line.active && line.p >= line.lo && line.p >= 1 {
            let v = oracle.eval(&line.func, line.p);
            self.candidates.set(2 * slot, (v, line.p, slot));
        } else {
            self.candidates.remove(2 * slot);
        }
    }

    fn refresh_right<O: FunctionOracle>(&mut self, slot: usize, oracle: &O) {
        let line = &self.lines[slot];
        if line.active && line.q <= line.hi && line.q <= self.domain {
            let v = oracle.eval(&line.func, line.q);
            self.candidates.set(2 * slot + 1, (v, line.q, slot));
        } else {
            self.candidates.remove(2 * slot + 1);
        }
    }
}
