/// Union by rank with path compression. Each set also carries a label so
/// that `union(a, b)` can report b's representative for the merged set.
#[derive(Clone, Debug)]
pub struct ClassicUf {
    parent: Vec<usize>,
    rank: Vec<u8>,
    label: Vec<usize>,
    ops: u64,
}

impl ClassicUf {
    pub fn new(n: usize) -> Self {
        ClassicUf {
            parent: (0..n).collect(),
            rank: vec![0; n],
            label: (0..n).collect(),
            ops: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Total pointer reads and writes so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    fn root(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
            self.ops += 1;
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            self.ops += 1;
            y = next;
        }
        self.ops += 1;
        r
    }

    /// Representative of x's set.
    pub fn find(&mut self, x: usize) -> usize {
        let r = self.root(x);
        self.label[r]
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.root(a) == self.root(b)
    }

    /// Merges the sets of `a` and `b`; the merged set keeps b's
    /// representative. Returns false if they were already together.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.root(a);
        let rb = self.root(b);
        if ra == rb {
            return false;
        }
        let keep = self.label[rb];
        let top = match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => {
                self.parent[ra] = rb;
                rb
            }
            std::cmp::Ordering::Greater => {
                self.parent[rb] = ra;
                ra
            }
            std::cmp::Ordering::Equal => {
                self.parent[ra] = rb;
                self.rank[rb] += 1;
                rb
            }
        };
        self.label[top] = keep;
        self.ops += 1;
        true
    }
}
