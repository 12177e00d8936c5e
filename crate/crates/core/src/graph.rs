//! Exhaustive exploration of a reduction graph: longest path when finite and
//! acyclic, a concrete cycle otherwise, or a budget signal.

use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<S> {
    Sn { max_len: usize },
    NotSn { cycle: Vec<S> },
    Unknown { fuel_spent: usize },
}

impl<S> Verdict<S> {
    pub fn is_sn(&self) -> bool {
        matches!(self, Verdict::Sn { .. })
    }

    pub fn is_not_sn(&self) -> bool {
        matches!(self, Verdict::NotSn { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::Sn { max_len } => format!("SN({max_len})"),
            Verdict::NotSn { cycle } => format!("NotSN(cycle of {})", cycle.len()),
            Verdict::Unknown { fuel_spent } => format!("Unknown({fuel_spent})"),
        }
    }
}

struct Frame<N, S> {
    key: String,
    succs: Vec<Option<(S, N)>>,
    idx: usize,
    best: usize,
    entered_by: Option<S>,
}

/// Depth-first search with memoized longest paths. `fuel` bounds the number
/// of distinct nodes expanded.
pub fn explore<N, S, E>(
    start: N,
    key: impl Fn(&N) -> String,
    mut succ: impl FnMut(&N) -> Result<Vec<(S, N)>, E>,
    fuel: usize,
) -> Result<Verdict<S>, E>
where
    S: Clone,
{
    let mut memo: HashMap<String, usize> = HashMap::new();
    let mut on_stack: HashMap<String, usize> = HashMap::new();
    let mut expanded = 1usize;
    let k0 = key(&start);
    let s0 = succ(&start)?.into_iter().map(Some).collect();
    on_stack.insert(k0.clone(), 0);
    let mut stack = vec![Frame { key: k0, succs: s0, idx: 0, best: 0, entered_by: None }];

    while let Some(top) = stack.last_mut() {
        if top.idx < top.succs.len() {
            let (s, n) = top.succs[top.idx].take().expect("successor visited once");
            top.idx += 1;
            let k = key(&n);
            if let Some(&len) = memo.get(&k) {
                top.best = top.best.max(len + 1);
                continue;
            }
            if let Some(&i) = on_stack.get(&k) {
                let mut cycle: Vec<S> = stack[i + 1..]
                    .iter()
                    .filter_map(|f| f.entered_by.clone())
                    .collect();
                cycle.push(s);
                return Ok(Verdict::NotSn { cycle });
            }
            if expanded >= fuel {
                return Ok(Verdict::Unknown { fuel_spent: expanded });
            }
            expanded += 1;
            let succs = succ(&n)?.into_iter().map(Some).collect();
            on_stack.insert(k.clone(), stack.len());
            stack.push(Frame { key: k, succs, idx: 0, best: 0, entered_by: Some(s) });
        } else {
            let done = stack.pop().unwrap();
            on_stack.remove(&done.key);
            memo.insert(done.key, done.best);
            match stack.last_mut() {
                Some(parent) => parent.best = parent.best.max(done.best + 1),
                None => return Ok(Verdict::Sn { max_len: done.best }),
            }
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(edges: &[(u32, u32)], start: u32, fuel: usize) -> Verdict<(u32, u32)> {
        let e = edges.to_vec();
        explore(
            start,
            |n| n.to_string(),
            |n| -> Result<_, ()> {
                Ok(e.iter().filter(|(a, _)| a == n).map(|&(a, b)| ((a, b), b)).collect())
            },
            fuel,
        )
        .unwrap()
    }

    #[test]
    fn longest_path() {
        assert_eq!(run(&[], 0, 10), Verdict::Sn { max_len: 0 });
        assert_eq!(run(&[(0, 1), (1, 2), (0, 2)], 0, 10), Verdict::Sn { max_len: 2 });
    }

    #[test]
    fn cycle_found() {
        match run(&[(0, 1), (1, 2), (2, 1)], 0, 10) {
            Verdict::NotSn { cycle } => assert_eq!(cycle, vec![(1, 2), (2, 1)]),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn fuel_runs_out() {
        let chain: Vec<(u32, u32)> = (0..100).map(|i| (i, i + 1)).collect();
        assert!(run(&chain, 0, 10).is_unknown());
    }
}
