/// Binary max-heap of variable indices keyed by an external activity array.
#[derive(Clone, Debug, Default)]
pub(super) struct VarHeap {
    heap: Vec<usize>,
    /// Position of each variable in `heap`, or `usize::MAX` when absent.
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VarHeap {
    pub fn grow(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, ABSENT);
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    pub fn insert(&mut self, v: usize, act: &[f64]) {
        debug_assert!(!self.contains(v));
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Restores order after the activity of `v` increased.
    pub fn decrease(&mut self, v: usize, act: &[f64]) {
        self.sift_up(self.pos[v], act);
    }

    pub fn pop_max(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv] >= act[v] {
                break;
            }
            self.heap[i] = pv;
            self.pos[pv] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && act[self.heap[right]] > act[self.heap[left]] {
                right
            } else {
                left
            };
            let cv = self.heap[child];
            if act[cv] <= act[v] {
                break;
            }
            self.heap[i] = cv;
            self.pos[cv] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}
