//! Index-based ternary structures and a compiled, bottom-up evaluator.
//!
//! Extensions are bitsets over states; every subformula is evaluated once for
//! all states.

use std::collections::HashMap;

use crate::models::TernaryModel;
use crate::syntax::{Formula, Vocabulary};

pub(crate) type Bits = Vec<u64>;

pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
pub(crate) fn get(bits: &[u64], k: usize) -> bool {
    bits[k / 64] >> (k % 64) & 1 == 1
}

#[inline]
pub(crate) fn set(bits: &mut [u64], k: usize) {
    bits[k / 64] |= 1 << (k % 64);
}

/// A ternary model with symbols replaced by vocabulary indices.
#[derive(Clone, Debug)]
pub(crate) struct Structure {
    pub n: usize,
    pub props: Vec<Bits>,
    /// agent → state → successor set
    pub succ: Vec<Vec<Bits>>,
    /// agent * |C| + constant → state → ordered pairs `(t, u)` with `sR tu`
    pub pairs: Vec<Vec<Vec<(u32, u32)>>>,
    pub constants: usize,
}

impl Structure {
    pub fn empty(n: usize, vocab: &Vocabulary) -> Structure {
        Structure::with_counts(n, vocab.props().len(), vocab.agents().len(), vocab.constants().len())
    }

    pub fn with_counts(n: usize, np: usize, na: usize, nc: usize) -> Structure {
        let w = words(n);
        Structure {
            n,
            props: vec![vec![0; w]; np],
            succ: vec![vec![vec![0; w]; n]; na],
            pairs: vec![vec![Vec::new(); n]; na * nc],
            constants: nc,
        }
    }

    pub fn from_model(m: &TernaryModel) -> Structure {
        let v = &m.vocab;
        let mut st = Structure::empty(m.len(), v);
        for (s, props) in m.val.iter().enumerate() {
            for p in props {
                if let Some(pi) = v.prop_index(p) {
                    set(&mut st.props[pi], s);
                }
            }
        }
        for (agent, edges) in &m.rel {
            if let Some(ai) = v.agent_index(agent) {
                for &(s, t) in edges {
                    set(&mut st.succ[ai][s], t);
                }
            }
        }
        for ((agent, constant), triples) in &m.tern {
            if let (Some(ai), Some(ci)) = (v.agent_index(agent), v.constant_index(constant)) {
                for &(s, t, u) in triples {
                    st.pairs[ai * st.constants + ci][s].push((t as u32, u as u32));
                }
            }
        }
        st
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Top,
    Prop(usize),
    Neg(usize),
    And(usize, usize),
    Box(usize, usize),
    /// `⊡_i^c φ`: (agent, constant, φ)
    BoxU(usize, usize, usize),
    /// `⊡_i^c(φ, ψ)`
    BoxB(usize, usize, usize, usize),
}

/// A formula flattened into hash-consed nodes in dependency order.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub nodes: Vec<Node>,
}

impl Program {
    /// Compiles `f`; all symbols must be in `vocab` and `f` must contain no
    /// `Kv` operator.
    pub fn compile(f: &Formula, vocab: &Vocabulary) -> Program {
        let mut p = Program { nodes: Vec::new() };
        let mut seen = HashMap::new();
        p.add(f, vocab, &mut seen);
        p
    }

    fn add<'a>(&mut self, f: &'a Formula, v: &Vocabulary, seen: &mut HashMap<&'a Formula, usize>) -> usize {
        if let Some(&k) = seen.get(f) {
            return k;
        }
        let agent = |a: &str| v.agent_index(a).expect("checked agent");
        let constant = |c: &str| v.constant_index(c).expect("checked constant");
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Prop(p) => Node::Prop(v.prop_index(p).expect("checked proposition")),
            Formula::Neg(a) => Node::Neg(self.add(a, v, seen)),
            Formula::And(a, b) => {
                let a = self.add(a, v, seen);
                Node::And(a, self.add(b, v, seen))
            }
            Formula::Box(i, a) => Node::Box(agent(i), self.add(a, v, seen)),
            Formula::BBoxU(i, c, a) => Node::BoxU(agent(i), constant(c), self.add(a, v, seen)),
            Formula::BBoxB(i, c, a, b) => {
                let a = self.add(a, v, seen);
                Node::BoxB(agent(i), constant(c), a, self.add(b, v, seen))
            }
            Formula::KvCond(..) => panic!("Kv has no ternary semantics"),
        };
        self.nodes.push(node);
        seen.insert(f, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Evaluates every node into `ext` (`nodes × words` u64s) and returns the
    /// root extension.
    pub fn run<'e>(&self, st: &Structure, ext: &'e mut Bits) -> &'e [u64] {
        let w = words(st.n);
        ext.clear();
        ext.resize(self.nodes.len() * w, 0);
        let tail = if st.n.is_multiple_of(64) { u64::MAX } else { (1u64 << (st.n % 64)) - 1 };
        for (k, node) in self.nodes.iter().enumerate() {
            let (done, rest) = ext.split_at_mut(k * w);
            let out = &mut rest[..w];
            let e = |j: usize| &done[j * w..(j + 1) * w];
            match *node {
                Node::Top => out.fill(u64::MAX),
                Node::Prop(p) => out.copy_from_slice(&st.props[p]),
                Node::Neg(a) => {
                    for (o, x) in out.iter_mut().zip(e(a)) {
                        *o = !x;
                    }
                }
                Node::And(a, b) => {
                    for ((o, x), y) in out.iter_mut().zip(e(a)).zip(e(b)) {
                        *o = x & y;
                    }
                }
                Node::Box(i, a) => {
                    let ea = e(a);
                    for s in 0..st.n {
                        if st.succ[i][s].iter().zip(ea).all(|(m, x)| m & !x == 0) {
                            set(out, s);
                        }
                    }
                }
                Node::BoxU(i, c, a) => {
                    let ea = e(a);
                    let slot = &st.pairs[i * st.constants + c];
                    for (s, pairs) in slot.iter().enumerate().take(st.n) {
                        if !pairs.iter().any(|&(t, u)| !get(ea, t as usize) && !get(ea, u as usize)) {
                            set(out, s);
                        }
                    }
                }
                Node::BoxB(i, c, a, b) => {
                    let (ea, eb) = (e(a), e(b));
                    let slot = &st.pairs[i * st.constants + c];
                    for (s, pairs) in slot.iter().enumerate().take(st.n) {
                        if !pairs.iter().any(|&(t, u)| !get(ea, t as usize) && !get(eb, u as usize)) {
                            set(out, s);
                        }
                    }
                }
            }
            out[w - 1] &= tail;
        }
        let root = self.nodes.len() - 1;
        &ext[root * w..(root + 1) * w]
    }
}
