//! State transition graphs, predecessor trees and causal graphs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::enumeration::enumerate_initial;
use crate::tagcore::{format_state_id, uncompress, BitDeque, CompressedState, Phase};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub len: u64,
    pub phase: u8,
    pub on_cycle: bool,
    /// Steps to the node's cycle, or to its terminal state.
    pub dist_to_cycle: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttractorKind {
    Cycle,
    Terminal,
}

/// One weakly connected component of the state graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attractor {
    pub kind: AttractorKind,
    /// Least state of the cycle, or the terminal state.
    pub representative: String,
    /// 0 for terminal states.
    pub period: u64,
    pub basin_size: u64,
    /// Longest path into the attractor.
    pub highway: u64,
}

#[derive(Clone, Debug, Default)]
pub struct StateGraph {
    states: Vec<CompressedState>,
    index: HashMap<CompressedState, usize>,
    successor: Vec<Option<usize>>,
    on_cycle: Vec<bool>,
    dist: Vec<u64>,
    /// Attractor index of each node.
    basin: Vec<usize>,
    attractors: Vec<Attractor>,
    /// The step budget ran out before the closure was complete.
    pub partial: bool,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &CompressedState {
        &self.states[i]
    }

    pub fn index_of(&self, c: &CompressedState) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn successor(&self, i: usize) -> Option<usize> {
        self.successor[i]
    }

    pub fn node(&self, i: usize) -> GraphNode {
        let s = &self.states[i];
        GraphNode {
            id: format_state_id(s),
            len: s.uncompressed_len(),
            phase: s.phase().as_u8(),
            on_cycle: self.on_cycle[i],
            dist_to_cycle: self.dist[i],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successor.iter().enumerate().filter_map(|(i, s)| s.map(|j| (i, j)))
    }

    pub fn attractors(&self) -> &[Attractor] {
        &self.attractors
    }

    pub fn component_count(&self) -> usize {
        self.attractors.len()
    }

    /// Periods of the cycles in the graph, sorted.
    pub fn cycle_periods(&self) -> Vec<u64> {
        let mut p: Vec<u64> = self.attractors.iter().filter(|a| a.kind == AttractorKind::Cycle).map(|a| a.period).collect();
        p.sort_unstable();
        p
    }

    /// Longest path into any attractor.
    pub fn longest_highway(&self) -> u64 {
        self.attractors.iter().map(|a| a.highway).max().unwrap_or(0)
    }

    fn add(&mut self, c: CompressedState) -> usize {
        if let Some(&i) = self.index.get(&c) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(c.clone(), i);
        self.states.push(c);
        self.successor.push(None);
        i
    }

    fn annotate(&mut self) {
        let n = self.states.len();
        self.on_cycle = vec![false; n];
        // 0 = unvisited, 1 = on current path, 2 = done.
        let mut color = vec![0u8; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = Some(start);
            while let Some(i) = v {
                if color[i] != 0 {
                    if color[i] == 1 {
                        let from = path.iter().position(|&p| p == i).unwrap();
                        for &p in &path[from..] {
                            self.on_cycle[p] = true;
                        }
                    }
                    break;
                }
                color[i] = 1;
                path.push(i);
                v = self.successor[i];
            }
            for p in path {
                color[p] = 2;
            }
        }
        // Attractors: cycles and terminal nodes (no successor).
        self.basin = vec![usize::MAX; n];
        self.attractors.clear();
        for i in 0..n {
            if self.basin[i] != usize::MAX {
                continue;
            }
            if self.successor[i].is_none() {
                self.basin[i] = self.attractors.len();
                self.attractors.push(Attractor {
                    kind: AttractorKind::Terminal,
                    representative: format_state_id(&self.states[i]),
                    period: 0,
                    basin_size: 0,
                    highway: 0,
                });
            } else if self.on_cycle[i] {
                let a = self.attractors.len();
                let mut members = vec![i];
                let mut j = self.successor[i].unwrap();
                while j != i {
                    members.push(j);
                    j = self.successor[j].unwrap();
                }
                let least = members.iter().map(|&m| &self.states[m]).min().unwrap();
                let representative = format_state_id(least);
                for &m in &members {
                    self.basin[m] = a;
                }
                self.attractors.push(Attractor {
                    kind: AttractorKind::Cycle,
                    representative,
                    period: members.len() as u64,
                    basin_size: 0,
                    highway: 0,
                });
            }
        }
        // Distances by walking each node to its first attractor node.
        self.dist = vec![u64::MAX; n];
        for i in 0..n {
            if self.basin[i] != usize::MAX {
                self.dist[i] = 0;
            }
        }
        for start in 0..n {
            let mut path = Vec::new();
            let mut v = start;
            while self.dist[v] == u64::MAX {
                path.push(v);
                v = self.successor[v].expect("non-attractor nodes have successors");
            }
            let (mut d, b) = (self.dist[v], self.basin[v]);
            for &p in path.iter().rev() {
                d += 1;
                self.dist[p] = d;
                self.basin[p] = b;
            }
        }
        for i in 0..n {
            let a = &mut self.attractors[self.basin[i]];
            a.basin_size += 1;
            a.highway = a.highway.max(self.dist[i]);
        }
    }

    /// Graphviz DOT. With `collapse_highways`, chains of off-cycle nodes
    /// with one predecessor and one successor are folded into a single
    /// edge labelled with its length.
    pub fn to_dot(&self, collapse_highways: bool) -> String {
        let n = self.states.len();
        let mut indeg = vec![0u32; n];
        for (_, j) in self.edges() {
            indeg[j] += 1;
        }
        let interior = |i: usize| collapse_highways && !self.on_cycle[i] && indeg[i] == 1 && self.successor[i].is_some();
        let mut out = String::from("digraph tagforge {\n  node [shape=box, fontsize=9];\n");
        for i in (0..n).filter(|&i| !interior(i)) {
            let node = self.node(i);
            writeln!(
                out,
                "  \"{}\" [len={}, phase={}, on_cycle={}, dist_to_cycle={}{}];",
                node.id,
                node.len,
                node.phase,
                node.on_cycle,
                node.dist_to_cycle,
                if node.on_cycle { ", style=filled, fillcolor=\"#f4cccc\"" } else { "" }
            )
            .unwrap();
        }
        for i in (0..n).filter(|&i| !interior(i)) {
            let Some(mut j) = self.successor[i] else { continue };
            let mut hops = 1u64;
            while interior(j) {
                j = self.successor[j].unwrap();
                hops += 1;
            }
            let from = format_state_id(&self.states[i]);
            let to = format_state_id(&self.states[j]);
            if hops > 1 {
                writeln!(out, "  \"{from}\" -> \"{to}\" [label={hops}, weight={hops}];").unwrap();
            } else {
                writeln!(out, "  \"{from}\" -> \"{to}\";").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<GraphNode> = (0..self.states.len()).map(|i| self.node(i)).collect();
        let edges: Vec<(String, String)> =
            self.edges().map(|(i, j)| (format_state_id(&self.states[i]), format_state_id(&self.states[j]))).collect();
        serde_json::json!({
            "format": "tagforge-graph v1",
            "partial": self.partial,
            "nodes": nodes,
            "edges": edges,
            "attractors": self.attractors,
        })
    }
}

/// Closure of every initial condition with word length `1..=max_word_length`
/// under the step map. At most `step_cap` new edges are followed; past that
/// the graph is marked partial.
pub fn state_transition_graph(max_word_length: u32, step_cap: u64) -> StateGraph {
    let seeds: Vec<CompressedState> = (1..=max_word_length).flat_map(|m| enumerate_initial(m, &Phase::ALL)).collect();
    graph_from_seeds(seeds, step_cap)
}

pub fn graph_from_seeds(seeds: impl IntoIterator<Item = CompressedState>, step_cap: u64) -> StateGraph {
    let mut g = StateGraph::default();
    let mut budget = step_cap;
    'seeds: for seed in seeds {
        let mut i = g.add(seed);
        loop {
            if g.successor[i].is_some() || g.states[i].is_halted() {
                break;
            }
            if budget == 0 {
                g.partial = true;
                break 'seeds;
            }
            budget -= 1;
            let mut next = g.states[i].clone();
            next.step();
            let known = g.index.contains_key(&next);
            let j = g.add(next);
            g.successor[i] = Some(j);
            if known {
                break;
            }
            i = j;
        }
    }
    // In a partial graph the unexpanded nodes show up as terminal.
    g.annotate();
    g
}

fn prefixed(first: bool, rest: impl Iterator<Item = bool>) -> BitDeque {
    let mut w = BitDeque::new();
    w.push(first);
    for b in rest {
        w.push(b);
    }
    w
}

/// All states whose successor is `target`, by inverting the six compressed
/// rules. Halted states have no successor and are never returned.
pub fn predecessors(target: &CompressedState) -> Vec<CompressedState> {
    let w = target.word();
    let m = w.len();
    let bits = |range: std::ops::Range<usize>| range.map(move |i| w.get(i));
    let mut out = Vec::new();
    match target.phase() {
        Phase::Zero => {
            // (1, 0): s -> (0, s)
            out.push(CompressedState::new(Phase::One, prefixed(false, bits(0..m))));
            // (2, 1): s -> (0, s + 1)
            if m >= 1 && w.get(m - 1) {
                out.push(CompressedState::new(Phase::Two, prefixed(true, bits(0..m - 1))));
            }
        }
        Phase::One => {
            // (0, 1): s -> (1, s + 11)
            if m >= 2 && w.get(m - 1) && w.get(m - 2) {
                out.push(CompressedState::new(Phase::Zero, prefixed(true, bits(0..m - 2))));
            }
            // (2, 0): s -> (1, s + 0)
            if m >= 1 && !w.get(m - 1) {
                out.push(CompressedState::new(Phase::Two, prefixed(false, bits(0..m - 1))));
            }
        }
        Phase::Two => {
            // (0, 0) and (1, 1): s -> (2, s + 0)
            if m >= 1 && !w.get(m - 1) {
                out.push(CompressedState::new(Phase::Zero, prefixed(false, bits(0..m - 1))));
                out.push(CompressedState::new(Phase::One, prefixed(true, bits(0..m - 1))));
            }
        }
    }
    out.retain(|p| !p.is_halted());
    out
}

/// Breadth-first predecessor tree. A state already in the tree is not
/// expanded again, so a state on a cycle contributes its cycle only once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredecessorTree {
    pub root: String,
    /// Number of new states at each depth, starting with the root.
    pub levels: Vec<u64>,
    /// The tree ran out of states before `depth_cap`.
    pub finite: bool,
}

impl PredecessorTree {
    /// Deepest non-empty level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `exp` of the least-squares slope of `ln(levels[t])` for `t` in
    /// `from..=to`.
    pub fn growth_rate(&self, from: usize, to: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = (from..=to.min(self.depth())).filter(|&t| self.levels[t] > 0).map(|t| (t as f64, (self.levels[t] as f64).ln())).collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        crate::enumeration::least_squares_slope(&xs, &ys).map(f64::exp)
    }
}

pub fn predecessor_tree(c: &CompressedState, depth_cap: usize) -> PredecessorTree {
    let mut seen: HashSet<CompressedState> = HashSet::new();
    seen.insert(c.clone());
    let mut frontier = vec![c.clone()];
    let mut levels = vec![1u64];
    let mut finite = false;
    for _ in 0..depth_cap {
        let mut next = Vec::new();
        for s in &frontier {
            for p in predecessors(s) {
                if seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            finite = true;
            break;
        }
        levels.push(next.len() as u64);
        frontier = next;
    }
    PredecessorTree { root: format_state_id(c), levels, finite }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// Leading 1: three symbols out, four in.
    Expansion,
    /// Leading 0: three symbols out, two in.
    Contraction,
    /// Removal of a residue shorter than three symbols.
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub kinds: Vec<EventKind>,
    /// `(producer, consumer)`, producer < consumer, deduplicated.
    pub edges: Vec<(u64, u64)>,
    /// The run was cut off by `max_steps`.
    pub truncated: bool,
}

impl CausalGraph {
    pub fn event_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn producers(&self, event: u64) -> Vec<u64> {
        self.edges.iter().filter(|e| e.1 == event).map(|e| e.0).collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causal {\n  node [shape=circle, label=\"\", width=0.15];\n");
        for (i, k) in self.kinds.iter().enumerate() {
            let color = match k {
                EventKind::Expansion => "#d62728",
                EventKind::Contraction => "#1f77b4",
                EventKind::Halt => "black",
            };
            writeln!(out, "  e{i} [style=filled, fillcolor=\"{color}\", tooltip=\"{i}\"];").unwrap();
        }
        for (a, b) in &self.edges {
            writeln!(out, "  e{a} -> e{b};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Event `t` consumes stream positions `3t..3t+3`; a producer edge runs from
/// the event that appended a consumed position. A non-empty final residue is
/// consumed by one `Halt` event.
pub fn causal_graph(c: &CompressedState, max_steps: u64) -> CausalGraph {
    let u = uncompress(c, 0);
    // Producer of each queued symbol; None for the initial string.
    let mut queue: VecDeque<(u8, Option<u64>)> = u.symbols().iter().map(|&s| (s, None)).collect();
    let mut kinds = Vec::new();
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut t = 0u64;
    loop {
        if queue.len() < 3 {
            if !queue.is_empty() {
                let mut producers: Vec<u64> = queue.drain(..).filter_map(|(_, p)| p).collect();
                producers.dedup();
                edges.extend(producers.into_iter().map(|p| (p, t)));
                kinds.push(EventKind::Halt);
            }
            break;
        }
        if t >= max_steps {
            truncated = true;
            break;
        }
        let consumed: Vec<(u8, Option<u64>)> = queue.drain(..3).collect();
        let lead = consumed[0].0;
        let mut producers: Vec<u64> = consumed.iter().filter_map(|&(_, p)| p).collect();
        producers.dedup();
        edges.extend(producers.into_iter().map(|p| (p, t)));
        let (kind, block): (EventKind, &[u8]) = if lead == 1 { (EventKind::Expansion, &[1, 1, 0, 1]) } else { (EventKind::Contraction, &[0, 0]) };
        kinds.push(kind);
        queue.extend(block.iter().map(|&s| (s, Some(t))));
        t += 1;
    }
    CausalGraph { kinds, edges, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagcore::parse_state_id;

    #[test]
    fn small_graphs() {
        let g = state_transition_graph(1, 1 << 20);
        assert!(!g.partial);
        assert_eq!(g.cycle_periods(), vec![2]);
        assert!(g.attractors().iter().any(|a| a.kind == AttractorKind::Terminal));
        let g = state_transition_graph(2, 1 << 20);
        assert_eq!(g.cycle_periods(), vec![2, 6]);
        assert!(state_transition_graph(0, 100).is_empty());
    }

    #[test]
    fn highway_at_four() {
        let g = state_transition_graph(4, 1 << 20);
        let h = g.longest_highway();
        assert!((400..450).contains(&h), "{h}");
        for (i, j) in g.edges() {
            let mut s = g.state(i).clone();
            s.step();
            assert_eq!(&s, g.state(j));
        }
    }

    #[test]
    fn partial_graph() {
        let g = state_transition_graph(4, 10);
        assert!(g.partial);
    }

    #[test]
    fn tree_of_on_cycle_state_is_finite() {
        let t = predecessor_tree(&parse_state_id("1100:0").unwrap(), 200);
        assert!(t.finite);
        assert_eq!(t.depth(), 21);
    }

    #[test]
    fn terminal_tree_growth() {
        let t = predecessor_tree(&parse_state_id("0:2").unwrap(), 30);
        assert!(!t.finite);
        let rate = t.growth_rate(10, 30).unwrap();
        assert!((1.08..=1.16).contains(&rate), "{rate}");
        assert!(predecessor_tree(&parse_state_id("0:1").unwrap(), 30).finite);
    }

    #[test]
    fn causal_examples() {
        let g = causal_graph(&parse_state_id("4:14:0").unwrap(), u64::MAX);
        assert_eq!(g.event_count(), 419);
        assert!(g.producers(0).is_empty());
        assert!(g.edges.iter().all(|&(a, b)| a < b));
        assert_eq!(g.count(EventKind::Halt), 1);
    }
}
