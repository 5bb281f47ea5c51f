use super::{CpResult, FixedPartition, Inconsistency, Propagator, Store, VarId};

/// Forward checking for `allDifferent`: the value of every fixed variable is
/// removed from all the others.
pub struct AllDifferentFc {
    vars: Vec<VarId>,
    fixed: FixedPartition,
    skip_last: bool,
}

impl AllDifferentFc {
    pub fn new(store: &mut Store, vars: &[VarId]) -> Self {
        Self::build(store, vars, false, true)
    }

    pub(crate) fn build(store: &mut Store, vars: &[VarId], skip_last: bool, trailed: bool) -> Self {
        AllDifferentFc {
            vars: vars.to_vec(),
            fixed: FixedPartition::new(store, vars.len(), trailed),
            skip_last,
        }
    }
}

impl Propagator for AllDifferentFc {
    fn scope(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        let last = self.vars.len() - 1;
        loop {
            let (before, nf) = self.fixed.update(store, &self.vars);
            if before == nf {
                return Ok(());
            }
            for k in before..nf {
                let i = self.fixed.order[k];
                let value = store.min(self.vars[i]);
                for (j, &y) in self.vars.iter().enumerate() {
                    if j == i || (self.skip_last && j == last) {
                        continue;
                    }
                    store.remove(y, value)?;
                }
            }
        }
    }
}

/// Arc-consistent `allDifferent` by maximum matching and strongly connected
/// components of the value graph.
pub struct AllDifferentAc {
    vars: Vec<VarId>,
    fixed: FixedPartition,
    /// Value matched to each variable by the previous call.
    matching: Vec<Option<i32>>,
}

impl AllDifferentAc {
    pub fn new(store: &mut Store, vars: &[VarId]) -> Self {
        Self::build(store, vars, true)
    }

    pub(crate) fn build(store: &mut Store, vars: &[VarId], trailed: bool) -> Self {
        AllDifferentAc {
            vars: vars.to_vec(),
            fixed: FixedPartition::new(store, vars.len(), trailed),
            matching: vec![None; vars.len()],
        }
    }
}

fn augment(
    x: usize,
    adj: &[Vec<usize>],
    var_match: &mut [Option<usize>],
    val_match: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &v in &adj[x] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match val_match[v] {
            None => true,
            Some(y) => augment(y, adj, var_match, val_match, seen),
        };
        if free {
            val_match[v] = Some(x);
            var_match[x] = Some(v);
            return true;
        }
    }
    false
}

/// Tarjan's algorithm; returns a component id per node.
fn strongly_connected(graph: &[Vec<usize>]) -> Vec<usize> {
    struct State<'a> {
        graph: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }

    fn visit(s: &mut State, u: usize) {
        s.index[u] = Some(s.next_index);
        s.low[u] = s.next_index;
        s.next_index += 1;
        s.stack.push(u);
        s.on_stack[u] = true;
        for k in 0..s.graph[u].len() {
            let w = s.graph[u][k];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[u] = s.low[u].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[u] = s.low[u].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[u]) == s.index[u] {
            loop {
                let w = s.stack.pop().expect("u is on the stack");
                s.on_stack[w] = false;
                s.comp[w] = s.next_comp;
                if w == u {
                    break;
                }
            }
            s.next_comp += 1;
        }
    }

    let n = graph.len();
    let mut s = State {
        graph,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![0; n],
        next_index: 0,
        next_comp: 0,
    };
    for u in 0..n {
        if s.index[u].is_none() {
            visit(&mut s, u);
        }
    }
    s.comp
}

impl Propagator for AllDifferentAc {
    fn scope(&self) -> &[VarId] {
        &self.vars
    }

    fn propagate(&mut self, store: &mut Store) -> CpResult<()> {
        let n = self.vars.len();
        if self.fixed.n_fixed.get(store) as usize == n {
            return Ok(());
        }
        self.fixed.update(store, &self.vars);

        let mut values: Vec<i32> = self.vars.iter().flat_map(|&x| store.values(x)).collect();
        values.sort_unstable();
        values.dedup();
        let m = values.len();
        if m < n {
            return Err(Inconsistency);
        }
        let index_of = |v: i32| values.binary_search(&v).expect("value of some domain");
        let adj: Vec<Vec<usize>> = self
            .vars
            .iter()
            .map(|&x| store.values(x).map(index_of).collect())
            .collect();

        // Keep whatever part of the previous matching is still valid.
        let mut var_match = vec![None; n];
        let mut val_match = vec![None; m];
        for (x, prev) in self.matching.iter().enumerate() {
            if let Some(v) = prev.filter(|&v| store.contains(self.vars[x], v)) {
                let k = index_of(v);
                if val_match[k].is_none() {
                    val_match[k] = Some(x);
                    var_match[x] = Some(k);
                }
            }
        }
        for x in 0..n {
            if var_match[x].is_none() {
                let mut seen = vec![false; m];
                if !augment(x, &adj, &mut var_match, &mut val_match, &mut seen) {
                    return Err(Inconsistency);
                }
            }
        }

        // Nodes: variables, then values, then a sink collecting free values.
        // Matching edges point value -> variable, the others variable -> value.
        let sink = n + m;
        let mut graph = vec![Vec::new(); n + m + 1];
        for x in 0..n {
            for &v in &adj[x] {
                if var_match[x] != Some(v) {
                    graph[x].push(n + v);
                }
            }
        }
        for v in 0..m {
            match val_match[v] {
                Some(x) => {
                    graph[n + v].push(x);
                    graph[sink].push(n + v);
                }
                None => graph[n + v].push(sink),
            }
        }
        let comp = strongly_connected(&graph);

        for x in 0..n {
            for &v in &adj[x] {
                if var_match[x] != Some(v) && comp[x] != comp[n + v] {
                    store.remove(self.vars[x], values[v])?;
                }
            }
        }
        for (slot, m) in self.matching.iter_mut().zip(&var_match) {
            *slot = m.map(|k| values[k]);
        }
        self.fixed.update(store, &self.vars);
        Ok(())
    }
}
