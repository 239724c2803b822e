/// Disjoint sets over `0..len` with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len as u32).collect(),
            size: vec![1; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] as usize != i {
            let grand = self.parent[self.parent[i] as usize];
            self.parent[i] = grand;
            i = grand as usize;
        }
        i
    }

    /// Merges the sets of `i` and `j`. Returns the new set size, or `None`
    /// if they were already in the same set.
    pub fn union(&mut self, i: usize, j: usize) -> Option<usize> {
        let mut a = self.find(i);
        let mut b = self.find(j);
        if a == b {
            return None;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        Some(self.size[a] as usize)
    }

    /// Size of the set containing `i`.
    pub fn set_size(&mut self, i: usize) -> usize {
        let r = self.find(i);
        self.size[r] as usize
    }

    pub fn is_root(&self, i: usize) -> bool {
        self.parent[i] as usize == i
    }

    /// Size stored at a representative. Only meaningful when `is_root(i)`.
    pub fn root_size(&self, i: usize) -> usize {
        self.size[i] as usize
    }
}
