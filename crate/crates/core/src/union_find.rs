/// Disjoint sets over `0..n` with path halving and union by size.
///
/// Every set may carry a mark (used for "contains a terminal"). `union`
/// refuses to join two marked sets, so a batch of contraction marks can never
/// fuse two terminals.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    marked: Vec<bool>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], marked: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn mark(&mut self, x: usize) {
        let r = self.find(x);
        self.marked[r] = true;
    }

    pub fn is_marked(&mut self, x: usize) -> bool {
        let r = self.find(x);
        self.marked[r]
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grand = self.parent[self.parent[x]];
            self.parent[x] = grand;
            x = grand;
        }
        x
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Merges the sets of `a` and `b`. Returns `false` if they already share a
    /// set or if both sets are marked.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb || (self.marked[ra] && self.marked[rb]) {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.marked[ra] |= self.marked[rb];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Groups all elements by representative; singleton sets are skipped.
    /// Groups and their members are sorted ascending.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        let mut groups: Vec<Vec<usize>> = by_root.into_iter().filter(|g| g.len() > 1).collect();
        groups.sort_by_key(|g| g[0]);
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn union_and_find() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert!(uf.same(0, 1));
        assert!(!uf.same(1, 3));
        assert_eq!(uf.set_size(4), 2);
        assert_eq!(uf.groups(), vec![vec![0, 1], vec![3, 4]]);
    }

    #[test]
    fn marked_sets_are_never_joined() {
        let mut uf = UnionFind::new(4);
        uf.mark(0);
        uf.mark(3);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 2));
        assert!(uf.is_marked(1));
        assert!(!uf.same(0, 3));
    }

    proptest! {
        #[test]
        fn find_is_idempotent(pairs in proptest::collection::vec((0usize..20, 0usize..20), 0..40)) {
            let mut uf = UnionFind::new(20);
            for (a, b) in pairs {
                uf.union(a, b);
            }
            for x in 0..20 {
                let r = uf.find(x);
                prop_assert_eq!(uf.find(r), r);
                prop_assert_eq!(uf.find(x), r);
            }
            let total: usize = uf.groups().iter().map(|g| g.len()).sum::<usize>()
                + (0..20).filter(|&x| uf.set_size(x) == 1).count();
            prop_assert_eq!(total, 20);
        }
    }
}
