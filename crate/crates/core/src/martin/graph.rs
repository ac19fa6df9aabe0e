use super::MartinError;
use crate::linalg;
use crate::rational::Rational;
use crate::smc::{successors_with_cap, SmcModel, DEFAULT_SUCCESSOR_CAP};
use crate::words::Word;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::{HashMap, HashSet, VecDeque};

/// The part of the chain reachable from a set of source words, restricted to
/// words no longer than `max_len`. Word length never decreases along a
/// transition, so longer words cannot lead back into this set.
#[derive(Debug, Clone)]
pub struct TransitionGraph {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    succ: Vec<Vec<(usize, Rational)>>,
    pred: Vec<Vec<usize>>,
    max_len: usize,
}

impl TransitionGraph {
    pub fn explore(
        model: &SmcModel,
        sources: &[Word],
        max_len: usize,
        cap: usize,
    ) -> Result<Self, MartinError> {
        let mut g = TransitionGraph {
            words: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            max_len,
        };
        let mut queue = VecDeque::new();
        for s in sources {
            if s.len() <= max_len && !g.index.contains_key(s) {
                let id = g.insert(s.clone());
                queue.push_back(id);
            }
        }
        while let Some(id) = queue.pop_front() {
            let next = successors_with_cap(model, &g.words[id], DEFAULT_SUCCESSOR_CAP)?;
            let mut edges = Vec::new();
            for (v, p) in next {
                if v.len() > max_len {
                    continue;
                }
                let vid = match g.index.get(&v) {
                    Some(&vid) => vid,
                    None => {
                        if g.words.len() >= cap {
                            return Err(MartinError::Budget { what: "intermediate word set", cap });
                        }
                        let vid = g.insert(v);
                        queue.push_back(vid);
                        vid
                    }
                };
                g.pred[vid].push(id);
                edges.push((vid, p));
            }
            g.succ[id] = edges;
        }
        Ok(g)
    }

    fn insert(&mut self, w: Word) -> usize {
        let id = self.words.len();
        self.index.insert(w.clone(), id);
        self.words.push(w);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        id
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn id(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.words[id]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn successors(&self, id: usize) -> &[(usize, Rational)] {
        &self.succ[id]
    }

    /// Every word of the graph from which `target` can be reached (including itself).
    pub fn ancestors(&self, target: usize) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut stack = vec![target];
        seen.insert(target);
        while let Some(v) = stack.pop() {
            for &u in &self.pred[v] {
                if seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        let mut out: Vec<usize> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// `G(z, target)` for every ancestor `z` of `target` (all other values are 0).
    ///
    /// Ancestors are grouped into strongly connected components and solved
    /// sinks first; each component solves `(I - P_C) g_C = δ + P_{C,out} g_out`
    /// exactly.
    pub fn green_column(&self, target: &Word) -> Result<HashMap<usize, Rational>, MartinError> {
        let Some(t) = self.id(target) else {
            return Ok(HashMap::new());
        };
        let anc = self.ancestors(t);
        let mut local: HashMap<usize, NodeIndex> = HashMap::with_capacity(anc.len());
        let mut graph: DiGraph<usize, ()> = DiGraph::with_capacity(anc.len(), anc.len() * 2);
        for &a in &anc {
            local.insert(a, graph.add_node(a));
        }
        for &a in &anc {
            for (v, _) in &self.succ[a] {
                if let Some(&nv) = local.get(v) {
                    graph.add_edge(local[&a], nv, ());
                }
            }
        }
        let mut values: HashMap<usize, Rational> = HashMap::with_capacity(anc.len());
        // tarjan_scc yields components in reverse topological order: successors first
        for comp in tarjan_scc(&graph) {
            let members: Vec<usize> = comp.iter().map(|&n| graph[n]).collect();
            let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let k = members.len();
            let mut rhs = vec![Rational::zero(); k];
            let mut a = vec![vec![Rational::zero(); k]; k];
            for (i, &z) in members.iter().enumerate() {
                a[i][i] = Rational::one();
                if z == t {
                    rhs[i] = Rational::one();
                }
                for (v, p) in &self.succ[z] {
                    if let Some(&j) = pos.get(v) {
                        a[i][j] -= p;
                    } else if let Some(gv) = values.get(v) {
                        rhs[i] += p * gv;
                    }
                }
            }
            let solution = if k == 1 {
                if a[0][0].is_zero() {
                    None
                } else {
                    Some(vec![&rhs[0] / &a[0][0]])
                }
            } else {
                linalg::solve(a, rhs)
            };
            let solution = solution.ok_or_else(|| MartinError::NonTransient {
                word: format!("{}", self.words[members[0]]),
            })?;
            for (z, g) in members.into_iter().zip(solution) {
                values.insert(z, g);
            }
        }
        Ok(values)
    }

    /// Exact `P^(n)(x, y)` by pushing the distribution of `x` through the graph.
    pub fn nstep(&self, x: &Word, y: &Word, n: usize) -> Rational {
        let (Some(xi), Some(yi)) = (self.id(x), self.id(y)) else {
            return Rational::zero();
        };
        let mut dist: HashMap<usize, Rational> = HashMap::new();
        dist.insert(xi, Rational::one());
        for _ in 0..n {
            let mut next: HashMap<usize, Rational> = HashMap::new();
            for (z, p) in &dist {
                for (v, q) in &self.succ[*z] {
                    *next.entry(*v).or_insert_with(Rational::zero) += p * q;
                }
            }
            dist = next;
        }
        dist.remove(&yi).unwrap_or_else(Rational::zero)
    }
}
