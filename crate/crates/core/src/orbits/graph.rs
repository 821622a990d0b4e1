/// A self-map of `{0, .., n-1}` stored as its successor array, with the
/// cycle/tail decomposition computed by in-degree peeling.
#[derive(Clone, Debug)]
pub struct FunctionalGraph {
    succ: Vec<u32>,
    periodic: Vec<bool>,
    /// Distance to the nearest periodic node (0 on cycles).
    height: Vec<u32>,
    /// Component id, numbered in order of each cycle's smallest node.
    component: Vec<u32>,
    components: usize,
}

impl FunctionalGraph {
    pub fn new(succ: Vec<u32>) -> Self {
        let n = succ.len();
        assert!(n <= u32::MAX as usize, "graph too large");
        assert!(succ.iter().all(|&s| (s as usize) < n), "successor out of range");

        let mut indeg = vec![0u32; n];
        for &s in &succ {
            indeg[s as usize] += 1;
        }
        let mut periodic = vec![true; n];
        let mut order: Vec<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let v = order[head] as usize;
            head += 1;
            periodic[v] = false;
            let s = succ[v] as usize;
            indeg[s] -= 1;
            if indeg[s] == 0 {
                order.push(s as u32);
            }
        }

        let mut component = vec![u32::MAX; n];
        let mut components = 0u32;
        for v in 0..n {
            if periodic[v] && component[v] == u32::MAX {
                let mut w = v;
                while component[w] == u32::MAX {
                    component[w] = components;
                    w = succ[w] as usize;
                }
                components += 1;
            }
        }
        let mut height = vec![0u32; n];
        for &v in order.iter().rev() {
            let s = succ[v as usize] as usize;
            height[v as usize] = height[s] + 1;
            component[v as usize] = component[s];
        }

        FunctionalGraph {
            succ,
            periodic,
            height,
            component,
            components: components as usize,
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> usize) -> Self {
        FunctionalGraph::new((0..n).map(|i| f(i) as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successor(&self, v: usize) -> usize {
        self.succ[v] as usize
    }

    pub fn is_periodic(&self, v: usize) -> bool {
        self.periodic[v]
    }

    pub fn periodic_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.periodic[v])
    }

    pub fn height(&self, v: usize) -> u32 {
        self.height[v]
    }

    pub fn max_height(&self) -> u32 {
        self.height.iter().copied().max().unwrap_or(0)
    }

    pub fn component(&self, v: usize) -> usize {
        self.component[v] as usize
    }

    pub fn num_components(&self) -> usize {
        self.components
    }
}
