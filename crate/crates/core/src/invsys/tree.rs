use std::collections::HashMap;

use rand::Rng;

use super::{Edge, Fiber, InverseSystem, SystemError, Thread};
use crate::poset::DirectedSet;

/// A finite rooted tree ordered by ancestry.
#[derive(Debug, Clone)]
pub struct Tree {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    rank: Vec<usize>,
    root: usize,
}

impl Tree {
    /// Builds a tree from node names and parent indices. Exactly one node may
    /// lack a parent and every node must reach it.
    pub fn from_parents(names: Vec<String>, parent: Vec<Option<usize>>) -> Result<Self, SystemError> {
        if names.is_empty() || names.len() != parent.len() {
            return Err(SystemError::InvalidTree("node and parent lists disagree or are empty".into()));
        }
        let n = names.len();
        let mut seen = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(SystemError::InvalidTree(format!("duplicate node `{name}`")));
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        let root = match roots[..] {
            [r] => r,
            [] => return Err(SystemError::InvalidTree("no root".into())),
            _ => return Err(SystemError::InvalidTree("more than one root".into())),
        };
        if let Some(bad) = parent.iter().flatten().find(|&&p| p >= n) {
            return Err(SystemError::InvalidTree(format!("parent index {bad} out of range")));
        }
        let mut rank = vec![usize::MAX; n];
        rank[root] = 0;
        for start in 0..n {
            let mut path = Vec::new();
            let mut x = start;
            while rank[x] == usize::MAX {
                if path.len() > n {
                    return Err(SystemError::InvalidTree(format!("cycle through `{}`", names[start])));
                }
                path.push(x);
                x = parent[x].expect("only the root lacks a parent");
            }
            let mut r = rank[x];
            for &y in path.iter().rev() {
                r += 1;
                rank[y] = r;
            }
        }
        Ok(Tree { names, parent, rank, root })
    }

    /// Builds a tree from node names and `child -> parent` pairs.
    pub fn from_named(nodes: Vec<String>, parent: &HashMap<String, String>) -> Result<Self, SystemError> {
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        for (c, p) in parent {
            for x in [c, p] {
                if !index.contains_key(x.as_str()) {
                    return Err(SystemError::InvalidTree(format!("unknown node `{x}`")));
                }
            }
        }
        let parents = nodes.iter().map(|s| parent.get(s).map(|p| index[p.as_str()])).collect();
        Self::from_parents(nodes, parents)
    }

    /// Complete binary tree with `height` levels; nodes named by their path
    /// from the root (`r`, `r0`, `r1`, `r00`, ...).
    pub fn full_binary(height: usize) -> Result<Self, SystemError> {
        if height == 0 || height > 20 {
            return Err(SystemError::SizeLimit { what: format!("binary tree of height {height}"), limit: 20 });
        }
        let mut names = vec!["r".to_string()];
        let mut parent = vec![None];
        let mut frontier = vec![0];
        for _ in 1..height {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for &p in &frontier {
                for bit in ['0', '1'] {
                    names.push(format!("{}{bit}", names[p]));
                    parent.push(Some(p));
                    next.push(names.len() - 1);
                }
            }
            frontier = next;
        }
        Self::from_parents(names, parent)
    }

    /// A random tree on `nodes` nodes: each new node hangs below a uniformly
    /// chosen earlier one.
    pub fn random<R: Rng>(rng: &mut R, nodes: usize) -> Result<Self, SystemError> {
        let names = (0..nodes).map(|i| format!("t{i}")).collect();
        let parent = (0..nodes).map(|i| (i > 0).then(|| rng.random_range(0..i))).collect();
        Self::from_parents(names, parent)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn name(&self, t: usize) -> &str {
        &self.names[t]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    /// Number of proper ancestors.
    pub fn rank(&self, t: usize) -> usize {
        self.rank[t]
    }

    /// One more than the largest rank.
    pub fn height(&self) -> usize {
        self.rank.iter().max().map_or(0, |r| r + 1)
    }

    /// Nodes of rank `alpha`, in node order.
    pub fn level(&self, alpha: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.rank[t] == alpha).collect()
    }

    /// The ancestor of `t` (or `t` itself) at rank `alpha <= rank(t)`.
    pub fn restrict(&self, mut t: usize, alpha: usize) -> usize {
        assert!(alpha <= self.rank[t], "restriction above the node's rank");
        while self.rank[t] > alpha {
            t = self.parent[t].expect("non-root has a parent");
        }
        t
    }

    /// Whether `s` is an ancestor of `t` or equal to it.
    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.rank[s] <= self.rank[t] && self.restrict(t, self.rank[s]) == s
    }

    /// Branches of full length, each listed from the root up, in
    /// lexicographic order of node indices.
    pub fn cofinal_branches(&self) -> Vec<Vec<usize>> {
        let h = self.height();
        let mut branches: Vec<Vec<usize>> = self
            .level(h - 1)
            .into_iter()
            .map(|top| (0..h).map(|a| self.restrict(top, a)).collect())
            .collect();
        branches.sort();
        branches
    }

    /// The system over the chain `0 < ... < height-1` whose fiber at `alpha`
    /// is level `alpha` and whose maps take a node to its ancestor.
    pub fn inverse_system(&self) -> Result<InverseSystem, SystemError> {
        let h = self.height();
        let levels: Vec<Vec<usize>> = (0..h).map(|a| self.level(a)).collect();
        if let Some(a) = levels.iter().position(Vec::is_empty) {
            return Err(SystemError::EmptyLevel(a));
        }
        let base = DirectedSet::chain(h)?;
        let fibers = levels
            .iter()
            .map(|l| Fiber::listed(l.iter().map(|&t| self.names[t].clone()).collect()).expect("node names are unique"))
            .collect();
        let edges = (1..h)
            .map(|b| {
                let pos = |t: usize| levels[b - 1].binary_search(&t).expect("parent is one level down");
                let map = levels[b].iter().map(|&t| pos(self.parent[t].expect("rank > 0"))).collect();
                Edge { lower: b - 1, upper: b, map }
            })
            .collect();
        InverseSystem::from_edges(base, fibers, edges)
    }

    /// The thread of the tree system picking the branch's node on each level.
    pub fn thread_from_branch(&self, branch: &[usize]) -> Result<Thread, SystemError> {
        let h = self.height();
        if branch.len() != h {
            return Err(SystemError::NotCofinal(format!("length {} but height {h}", branch.len())));
        }
        for (a, &t) in branch.iter().enumerate() {
            if t >= self.len() || self.rank[t] != a {
                return Err(SystemError::NotCofinal(format!("entry {a} is not on level {a}")));
            }
            if a > 0 && self.parent[t] != Some(branch[a - 1]) {
                return Err(SystemError::NotCofinal(format!("`{}` is not a child of its predecessor", self.names[t])));
            }
        }
        Ok(Thread(
            branch
                .iter()
                .enumerate()
                .map(|(a, &t)| self.level(a).binary_search(&t).expect("node lies on its level"))
                .collect(),
        ))
    }

    /// The branch read off a thread of [`Tree::inverse_system`].
    pub fn branch_from_thread(&self, thread: &Thread) -> Result<Vec<usize>, SystemError> {
        let h = self.height();
        if thread.0.len() != h {
            return Err(SystemError::NotCofinal(format!("thread has {} entries, height is {h}", thread.0.len())));
        }
        let branch = thread
            .0
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                self.level(a).get(i).copied().ok_or_else(|| SystemError::NotCofinal(format!("no node {i} on level {a}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.thread_from_branch(&branch)?;
        Ok(branch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn path3() -> Tree {
        Tree::from_parents(vec!["a".into(), "b".into(), "c".into()], vec![None, Some(0), Some(1)]).unwrap()
    }

    #[test]
    fn root_only() {
        let t = Tree::from_parents(vec!["r".into()], vec![None]).unwrap();
        assert_eq!(t.height(), 1);
        assert_eq!(t.cofinal_branches(), vec![vec![0]]);
        let sys = t.inverse_system().unwrap();
        assert_eq!(sys.base().len(), 1);
        let th = t.thread_from_branch(&[0]).unwrap();
        assert_eq!(t.branch_from_thread(&th).unwrap(), vec![0]);
    }

    #[test]
    fn path_ranks() {
        let t = path3();
        assert_eq!(t.height(), 3);
        assert_eq!((t.rank(0), t.rank(1), t.rank(2)), (0, 1, 2));
        assert_eq!(t.cofinal_branches().len(), 1);
        assert!(t.leq(0, 2) && !t.leq(2, 0));
    }

    #[test]
    fn full_binary_branch_counts() {
        for h in 1..=5 {
            let t = Tree::full_binary(h).unwrap();
            assert_eq!(t.cofinal_branches().len(), 1 << (h - 1));
        }
    }

    #[test]
    fn binary_height_three_threads() {
        let t = Tree::full_binary(3).unwrap();
        let sys = t.inverse_system().unwrap();
        assert_eq!(sys.enumerate_threads().unwrap().len(), 4);
        let leftmost = t.cofinal_branches()[0].clone();
        let names: Vec<&str> = leftmost.iter().map(|&n| t.name(n)).collect();
        assert_eq!(names, ["r", "r0", "r00"]);
        assert_eq!(t.thread_from_branch(&leftmost).unwrap(), Thread(vec![0, 0, 0]));
    }

    #[test]
    fn short_leaves_contribute_no_threads() {
        // r -> a -> c, r -> b (b stops at rank 1)
        let t = Tree::from_parents(
            vec!["r".into(), "a".into(), "b".into(), "c".into()],
            vec![None, Some(0), Some(0), Some(1)],
        )
        .unwrap();
        assert_eq!(t.cofinal_branches().len(), 1);
        assert_eq!(t.inverse_system().unwrap().enumerate_threads().unwrap().len(), 1);
        assert!(matches!(t.thread_from_branch(&[0, 2]), Err(SystemError::NotCofinal(_))));
    }

    #[test]
    fn malformed_trees() {
        let two_roots = Tree::from_parents(vec!["a".into(), "b".into()], vec![None, None]);
        assert!(matches!(two_roots, Err(SystemError::InvalidTree(_))));
        let cycle = Tree::from_parents(vec!["r".into(), "a".into(), "b".into()], vec![None, Some(2), Some(1)]);
        assert!(matches!(cycle, Err(SystemError::InvalidTree(_))));
    }

    #[test]
    fn branch_round_trips_on_random_trees() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.random_range(1..=40);
            let t = Tree::random(&mut rng, n).unwrap();
            let threads = t.inverse_system().unwrap().enumerate_threads().unwrap();
            let branches = t.cofinal_branches();
            assert_eq!(threads.len(), branches.len());
            for b in &branches {
                let th = t.thread_from_branch(b).unwrap();
                assert_eq!(&t.branch_from_thread(&th).unwrap(), b);
            }
            for th in &threads {
                assert_eq!(&t.thread_from_branch(&t.branch_from_thread(th).unwrap()).unwrap(), th);
            }
        }
    }
}
