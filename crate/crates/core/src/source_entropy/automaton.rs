//! Suffix automaton over token IDs, built online.
//!
//! Besides the usual `len`/`link`/transitions, every state records the
//! smallest end position of its strings (`first_end`). All strings of a
//! state share one end-position set, so `first_end` answers "does this
//! substring occur ending at or before position p" in O(1).

use std::collections::HashMap;

const ROOT: u32 = 0;
const NONE: u32 = u32::MAX;
/// Transition lists longer than this move to a hash map.
const SMALL_EDGES: usize = 8;

#[derive(Debug, Clone)]
enum Edges {
    Small(Vec<(u32, u32)>),
    Large(HashMap<u32, u32>),
}

impl Edges {
    fn get(&self, token: u32) -> Option<u32> {
        match self {
            Edges::Small(v) => v.iter().find(|e| e.0 == token).map(|e| e.1),
            Edges::Large(m) => m.get(&token).copied(),
        }
    }

    fn set(&mut self, token: u32, target: u32) {
        match self {
            Edges::Small(v) => {
                if let Some(e) = v.iter_mut().find(|e| e.0 == token) {
                    e.1 = target;
                } else if v.len() < SMALL_EDGES {
                    v.push((token, target));
                } else {
                    let mut m: HashMap<u32, u32> = v.drain(..).collect();
                    m.insert(token, target);
                    *self = Edges::Large(m);
                }
            }
            Edges::Large(m) => {
                m.insert(token, target);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SuffixAutomaton {
    len: Vec<u32>,
    link: Vec<u32>,
    first_end: Vec<u32>,
    edges: Vec<Edges>,
    last: u32,
}

impl SuffixAutomaton {
    pub(crate) fn new(capacity: usize) -> Self {
        let cap = 2 * capacity.max(1);
        let mut sam = Self {
            len: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
            edges: Vec::with_capacity(cap),
            last: ROOT,
        };
        sam.push_state(0, NONE, NONE, Edges::Small(Vec::new()));
        sam
    }

    pub(crate) fn build(tokens: &[u32]) -> Self {
        let mut sam = Self::new(tokens.len());
        for (pos, &t) in tokens.iter().enumerate() {
            sam.extend(t, pos as u32);
        }
        sam
    }

    fn push_state(&mut self, len: u32, link: u32, first_end: u32, edges: Edges) -> u32 {
        let id = self.len.len() as u32;
        self.len.push(len);
        self.link.push(link);
        self.first_end.push(first_end);
        self.edges.push(edges);
        id
    }

    /// Appends `token`, which sits at text position `pos`.
    pub(crate) fn extend(&mut self, token: u32, pos: u32) {
        let cur = self.push_state(
            self.len[self.last as usize] + 1,
            NONE,
            pos,
            Edges::Small(Vec::new()),
        );
        let mut p = self.last;
        while p != NONE && self.edges[p as usize].get(token).is_none() {
            self.edges[p as usize].set(token, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = ROOT;
        } else {
            let q = self.edges[p as usize].get(token).expect("checked above");
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q;
            } else {
                let clone = self.push_state(
                    self.len[p as usize] + 1,
                    self.link[q as usize],
                    self.first_end[q as usize],
                    self.edges[q as usize].clone(),
                );
                while p != NONE && self.edges[p as usize].get(token) == Some(q) {
                    self.edges[p as usize].set(token, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone;
                self.link[cur as usize] = clone;
            }
        }
        self.last = cur;
    }

    pub(crate) fn root(&self) -> u32 {
        ROOT
    }

    pub(crate) fn next(&self, state: u32, token: u32) -> Option<u32> {
        self.edges[state as usize].get(token)
    }

    pub(crate) fn link(&self, state: u32) -> u32 {
        self.link[state as usize]
    }

    pub(crate) fn max_len(&self, state: u32) -> u32 {
        self.len[state as usize]
    }

    pub(crate) fn first_end(&self, state: u32) -> u32 {
        self.first_end[state as usize]
    }

    #[cfg(test)]
    pub(crate) fn n_states(&self) -> usize {
        self.len.len()
    }
}
