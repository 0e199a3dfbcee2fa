use serde::{Deserialize, Serialize};

use crate::error::DsuError;

const NONE: usize = usize::MAX;
/// Microset capacity: one machine word of marks.
const MICRO_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StaticTreeMode {
    /// Word-sized microsets with ancestor masks plus a macro union-find over
    /// microset roots.
    MicroMacro,
    /// Jump pointers with path compression only.
    PathCompression,
}

impl Default for StaticTreeMode {
    fn default() -> Self {
        if cfg!(feature = "path-compression-uf") {
            StaticTreeMode::PathCompression
        } else {
            StaticTreeMode::MicroMacro
        }
    }
}

/// Union-find where every union links a vertex to its parent in a fixed
/// rooted forest. The representative of a set is its topmost member.
#[derive(Clone, Debug)]
pub struct StaticTreeUf {
    parent: Vec<usize>,
    linked: Vec<bool>,
    ops: u64,
    links: u64,
    finds: u64,
    engine: Engine,
}

#[derive(Clone, Debug)]
enum Engine {
    Micro(MicroMacro),
    Compress(Vec<usize>),
}

#[derive(Clone, Debug)]
struct MicroMacro {
    micro: Vec<u32>,
    anc: Vec<u64>,
    members: Vec<usize>,
    start: Vec<usize>,
    marks: Vec<u64>,
    /// Parent (outside the microset) of the microset's top nodes, or NONE.
    micro_root: Vec<usize>,
    local: Vec<u8>,
    mparent: Vec<usize>,
    mrank: Vec<u8>,
    mlabel: Vec<usize>,
}

impl StaticTreeUf {
    /// `parent[v]` is v's parent in the union forest, `None` for roots.
    pub fn new(parent: &[Option<usize>]) -> Result<Self, DsuError> {
        Self::with_mode(parent, StaticTreeMode::default())
    }

    pub fn with_mode(parent: &[Option<usize>], mode: StaticTreeMode) -> Result<Self, DsuError> {
        let n = parent.len();
        let mut par = vec![NONE; n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(DsuError::OutOfRange { id: p, n });
                }
                if p == v {
                    return Err(DsuError::InvalidTree(v));
                }
                par[v] = p;
            }
        }
        let order = bfs_order(&par)?;
        let engine = match mode {
            StaticTreeMode::MicroMacro => Engine::Micro(MicroMacro::build(&par, &order)),
            StaticTreeMode::PathCompression => Engine::Compress(par.clone()),
        };
        Ok(StaticTreeUf {
            parent: par,
            linked: vec![false; n],
            ops: 0,
            links: 0,
            finds: 0,
            engine,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn mode(&self) -> StaticTreeMode {
        match self.engine {
            Engine::Micro(_) => StaticTreeMode::MicroMacro,
            Engine::Compress(_) => StaticTreeMode::PathCompression,
        }
    }

    pub fn tree_parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then_some(self.parent[v])
    }

    pub fn is_linked(&self, v: usize) -> bool {
        self.linked[v]
    }

    pub fn ops(&self) -> u64 {
        self.ops
    }

    pub fn links(&self) -> u64 {
        self.links
    }

    pub fn finds(&self) -> u64 {
        self.finds
    }

    /// Merges v's set into the set of its tree parent.
    pub fn link(&mut self, v: usize) -> Result<(), DsuError> {
        let n = self.parent.len();
        if v >= n {
            return Err(DsuError::OutOfRange { id: v, n });
        }
        if self.parent[v] == NONE {
            return Err(DsuError::LinkOnRoot(v));
        }
        if self.linked[v] {
            return Err(DsuError::DoubleLink(v));
        }
        self.linked[v] = true;
        self.links += 1;
        self.ops += 1;
        if let Engine::Micro(mm) = &mut self.engine {
            let s = mm.micro[v] as usize;
            mm.marks[s] |= 1u64 << mm.local[v];
        }
        Ok(())
    }

    /// Topmost member of v's set.
    pub fn find(&mut self, v: usize) -> Result<usize, DsuError> {
        let n = self.parent.len();
        if v >= n {
            return Err(DsuError::OutOfRange { id: v, n });
        }
        self.finds += 1;
        let r = match &mut self.engine {
            Engine::Micro(mm) => mm.find(v, &mut self.ops),
            Engine::Compress(jump) => {
                let mut x = v;
                while self.linked[x] {
                    x = jump[x];
                    self.ops += 1;
                }
                let mut y = v;
                while y != x {
                    let next = jump[y];
                    jump[y] = x;
                    self.ops += 1;
                    y = next;
                }
                self.ops += 1;
                x
            }
        };
        Ok(r)
    }
}

fn bfs_order(par: &[usize]) -> Result<Vec<usize>, DsuError> {
    let n = par.len();
    let mut head = vec![NONE; n];
    let mut next = vec![NONE; n];
    for v in (0..n).rev() {
        if par[v] != NONE {
            next[v] = head[par[v]];
            head[par[v]] = v;
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| par[v] == NONE).collect();
    let mut i = 0;
    while i < order.len() {
        let mut c = head[order[i]];
        while c != NONE {
            order.push(c);
            c = next[c];
        }
        i += 1;
    }
    if order.len() < n {
        let mut seen = vec![false; n];
        for &v in &order {
            seen[v] = true;
        }
        let bad = (0..n).find(|&v| !seen[v]).unwrap_or(0);
        return Err(DsuError::InvalidTree(bad));
    }
    Ok(order)
}

impl MicroMacro {
    fn build(par: &[usize], order: &[usize]) -> Self {
        let n = par.len();
        let mut micro = vec![0u32; n];
        let mut local = vec![0u8; n];
        let mut members: Vec<usize> = Vec::with_capacity(n);
        let mut start: Vec<usize> = vec![0];
        let mut micro_root: Vec<usize> = Vec::new();

        let mut close = |group: &mut Vec<usize>, root: usize| {
            let id = micro_root.len() as u32;
            for (pos, &x) in group.iter().enumerate() {
                micro[x] = id;
                local[x] = pos as u8;
            }
            members.append(group);
            start.push(members.len());
            micro_root.push(root);
        };

        // Bottom-up: each vertex gathers its children's open groups. A group
        // lists its top vertex first, so ancestors precede descendants.
        let mut open: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &v in order {
            if par[v] != NONE {
                children[par[v]].push(v);
            }
        }
        for &v in order.iter().rev() {
            let mut cur = vec![v];
            let mut pack: Vec<usize> = Vec::new();
            for &c in &children[v] {
                let mut g = std::mem::take(&mut open[c]);
                if g.is_empty() {
                    continue;
                }
                if cur.len() + g.len() <= MICRO_BITS {
                    cur.append(&mut g);
                } else {
                    if pack.len() + g.len() > MICRO_BITS {
                        close(&mut pack, v);
                    }
                    pack.append(&mut g);
                }
            }
            if !pack.is_empty() {
                close(&mut pack, v);
            }
            if par[v] == NONE || cur.len() == MICRO_BITS {
                close(&mut cur, par[v]);
            } else {
                open[v] = cur;
            }
        }

        let mut anc = vec![0u64; n];
        let count = micro_root.len();
        for s in 0..count {
            for &x in &members[start[s]..start[s + 1]] {
                let bit = 1u64 << local[x];
                let p = par[x];
                anc[x] = if p != NONE && micro[p] as usize == s {
                    anc[p] | bit
                } else {
                    bit
                };
            }
        }
        MicroMacro {
            micro,
            anc,
            members,
            start,
            marks: vec![0; count],
            micro_root,
            local,
            mparent: (0..n).collect(),
            mrank: vec![0; n],
            mlabel: (0..n).collect(),
        }
    }

    /// Deepest unmarked ancestor of x inside x's microset.
    #[inline]
    fn micro_find(&self, x: usize) -> Option<usize> {
        let s = self.micro[x] as usize;
        let free = self.anc[x] & !self.marks[s];
        if free == 0 {
            None
        } else {
            let pos = 63 - free.leading_zeros() as usize;
            Some(self.members[self.start[s] + pos])
        }
    }

    fn macro_root(&mut self, x: usize, ops: &mut u64) -> usize {
        let mut r = x;
        while self.mparent[r] != r {
            r = self.mparent[r];
            *ops += 1;
        }
        let mut y = x;
        while self.mparent[y] != r {
            let next = self.mparent[y];
            self.mparent[y] = r;
            *ops += 1;
            y = next;
        }
        r
    }

    /// Joins a fully marked macro node `x` with the root of its microset;
    /// the merged set keeps the upper set's label.
    fn macro_union(&mut self, x: usize, up: usize, ops: &mut u64) {
        let rx = self.macro_root(x, ops);
        let ru = self.macro_root(up, ops);
        if rx == ru {
            return;
        }
        let keep = self.mlabel[ru];
        let top = if self.mrank[rx] > self.mrank[ru] {
            self.mparent[ru] = rx;
            rx
        } else {
            if self.mrank[rx] == self.mrank[ru] {
                self.mrank[ru] += 1;
            }
            self.mparent[rx] = ru;
            ru
        };
        self.mlabel[top] = keep;
        *ops += 1;
    }

    fn find(&mut self, v: usize, ops: &mut u64) -> usize {
        *ops += 1;
        if let Some(r) = self.micro_find(v) {
            return r;
        }
        let mut r = self.micro_root[self.micro[v] as usize];
        loop {
            let root = self.macro_root(r, ops);
            let x = self.mlabel[root];
            *ops += 1;
            if let Some(ans) = self.micro_find(x) {
                return ans;
            }
            // Every ancestor of x inside its microset is linked, so x's set
            // continues at the microset's root from now on.
            let up = self.micro_root[self.micro[x] as usize];
            self.macro_union(x, up, ops);
            r = up;
        }
    }
}
