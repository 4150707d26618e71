//! Expression-tree genome over `{OR, XOR, AND, IF, NOT}` with variable leaves.
//!
//! Trees are stored as a prefix-order node vector; a subtree is a contiguous
//! slice. Depth counts levels, so a single leaf has depth 1.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::truth_table::{check_vars, tail_mask, word_count, TruthTable, VAR_MASKS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Or,
    Xor,
    And,
    /// `IF(c, t, e)`: `t` where `c` holds, `e` elsewhere.
    If,
    Not,
    /// 0-indexed variable; printed as `x{j+1}`.
    Var(u8),
}

impl Node {
    pub const FUNCTIONS: [Node; 5] = [Node::Or, Node::Xor, Node::And, Node::If, Node::Not];

    pub fn arity(self) -> usize {
        match self {
            Node::Or | Node::Xor | Node::And => 2,
            Node::If => 3,
            Node::Not => 1,
            Node::Var(_) => 0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Node::Or => "OR",
            Node::Xor => "XOR",
            Node::And => "AND",
            Node::If => "IF",
            Node::Not => "NOT",
            Node::Var(_) => "x",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpParams {
    /// Hard cap enforced after every operator.
    pub max_depth: usize,
    /// Ramped half-and-half initialisation depth range.
    pub init_min_depth: usize,
    pub init_max_depth: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        Self {
            max_depth: 8,
            init_min_depth: 2,
            init_max_depth: 6,
        }
    }
}

impl GpParams {
    pub fn validate(&self) -> Result<()> {
        if self.init_min_depth == 0
            || self.init_min_depth > self.init_max_depth
            || self.init_max_depth > self.max_depth
        {
            return param(format!(
                "GP depths must satisfy 1 <= init_min ({}) <= init_max ({}) <= max ({})",
                self.init_min_depth, self.init_max_depth, self.max_depth
            ));
        }
        Ok(())
    }
}

/// Attempts per crossover or mutation before falling back to a parent copy.
pub const RETRY_BUDGET: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpGenome {
    n: usize,
    nodes: Vec<Node>,
    params: GpParams,
}

/// Exclusive end of the subtree rooted at `i`.
pub fn subtree_end(nodes: &[Node], i: usize) -> usize {
    let mut need = 1usize;
    let mut j = i;
    while need > 0 {
        need = need + nodes[j].arity() - 1;
        j += 1;
    }
    j
}

/// Depth of every node, root at depth 1.
fn node_depths(nodes: &[Node]) -> Vec<usize> {
    let mut depths = vec![0; nodes.len()];
    // stack of child slots still to fill, tagged with the parent's depth
    let mut open: Vec<(usize, usize)> = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        let d = match open.last_mut() {
            Some((remaining, pd)) => {
                let d = *pd + 1;
                *remaining -= 1;
                if *remaining == 0 {
                    open.pop();
                }
                d
            }
            None => 1,
        };
        depths[i] = d;
        if node.arity() > 0 {
            open.push((node.arity(), d));
        }
    }
    depths
}

pub fn tree_depth(nodes: &[Node]) -> usize {
    node_depths(nodes).into_iter().max().unwrap_or(0)
}

fn children(nodes: &[Node], i: usize) -> impl Iterator<Item = usize> + '_ {
    let mut next = i + 1;
    (0..nodes[i].arity()).map(move |_| {
        let c = next;
        next = subtree_end(nodes, c);
        c
    })
}

fn random_var<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Node {
    Node::Var(rng.gen_range(0..n) as u8)
}

/// Full (`full = true`) or grow method, appending prefix nodes to `out`.
fn build<R: Rng + ?Sized>(n: usize, depth: usize, full: bool, rng: &mut R, out: &mut Vec<Node>) {
    let node = if depth <= 1 {
        random_var(n, rng)
    } else if full {
        Node::FUNCTIONS[rng.gen_range(0..Node::FUNCTIONS.len())]
    } else {
        let k = rng.gen_range(0..Node::FUNCTIONS.len() + n);
        if k < Node::FUNCTIONS.len() {
            Node::FUNCTIONS[k]
        } else {
            Node::Var((k - Node::FUNCTIONS.len()) as u8)
        }
    };
    out.push(node);
    for _ in 0..node.arity() {
        build(n, depth - 1, full, rng, out);
    }
}

impl GpGenome {
    pub fn from_nodes(n: usize, nodes: Vec<Node>, params: GpParams) -> Result<Self> {
        check_vars(n)?;
        params.validate()?;
        if nodes.is_empty() {
            return param("empty expression tree");
        }
        let mut need = 1usize;
        for (i, node) in nodes.iter().enumerate() {
            if need == 0 {
                return param(format!("trailing nodes after position {i}"));
            }
            if let Node::Var(j) = node {
                if *j as usize >= n {
                    return param(format!("variable x{} out of range for n = {n}", j + 1));
                }
            }
            need = need + node.arity() - 1;
        }
        if need != 0 {
            return param("expression tree is missing arguments");
        }
        let depth = tree_depth(&nodes);
        if depth > params.max_depth {
            return param(format!(
                "tree depth {depth} exceeds max depth {}",
                params.max_depth
            ));
        }
        Ok(Self { n, nodes, params })
    }

    /// Ramped half-and-half: depth uniform in the init range, full or grow with equal odds.
    pub fn random<R: Rng + ?Sized>(n: usize, params: GpParams, rng: &mut R) -> Result<Self> {
        check_vars(n)?;
        params.validate()?;
        let depth = rng.gen_range(params.init_min_depth..=params.init_max_depth);
        let full = rng.gen_bool(0.5);
        let mut nodes = Vec::new();
        build(n, depth, full, rng, &mut nodes);
        Ok(Self { n, nodes, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> GpParams {
        self.params
    }

    pub fn depth(&self) -> usize {
        tree_depth(&self.nodes)
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Bit-sliced evaluation: each variable is a `2^n`-bit mask and every operator
    /// works a word at a time.
    pub fn decode(&self) -> TruthTable {
        let n = self.n;
        let wc = word_count(n);
        let tail = tail_mask(n);
        let mut stack: Vec<Vec<u64>> = Vec::new();
        let mut pool: Vec<Vec<u64>> = Vec::new();
        for node in self.nodes.iter().rev() {
            match *node {
                Node::Var(j) => {
                    let mut buf = pool.pop().unwrap_or_else(|| vec![0; wc]);
                    let j = j as usize;
                    if j < 6 {
                        buf.fill(VAR_MASKS[j] & tail);
                    } else {
                        let stride = 1usize << (j - 6);
                        for (k, w) in buf.iter_mut().enumerate() {
                            *w = if k & stride != 0 { u64::MAX } else { 0 };
                        }
                    }
                    stack.push(buf);
                }
                Node::Not => {
                    let a = stack.last_mut().expect("arity checked");
                    a.iter_mut().for_each(|w| *w = !*w & tail);
                }
                Node::And | Node::Or | Node::Xor => {
                    let mut a = stack.pop().expect("arity checked");
                    let b = stack.pop().expect("arity checked");
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x = match node {
                            Node::And => *x & y,
                            Node::Or => *x | y,
                            _ => *x ^ y,
                        };
                    }
                    pool.push(b);
                    stack.push(a);
                }
                Node::If => {
                    let mut c = stack.pop().expect("arity checked");
                    let t = stack.pop().expect("arity checked");
                    let e = stack.pop().expect("arity checked");
                    for ((x, y), z) in c.iter_mut().zip(&t).zip(&e) {
                        *x = (*x & y) | (!*x & z);
                    }
                    pool.push(t);
                    pool.push(e);
                    stack.push(c);
                }
            }
        }
        let words = stack.pop().expect("non-empty tree");
        TruthTable::from_words(n, words).expect("decoded words are in range")
    }

    /// Evaluates the tree on a single input index.
    pub fn eval_at(&self, x: usize) -> bool {
        fn go(nodes: &[Node], i: usize, x: usize) -> (bool, usize) {
            match nodes[i] {
                Node::Var(j) => ((x >> j) & 1 == 1, i + 1),
                Node::Not => {
                    let (a, next) = go(nodes, i + 1, x);
                    (!a, next)
                }
                Node::If => {
                    let (c, i1) = go(nodes, i + 1, x);
                    let (t, i2) = go(nodes, i1, x);
                    let (e, i3) = go(nodes, i2, x);
                    (if c { t } else { e }, i3)
                }
                op => {
                    let (a, i1) = go(nodes, i + 1, x);
                    let (b, i2) = go(nodes, i1, x);
                    let v = match op {
                        Node::And => a & b,
                        Node::Or => a | b,
                        _ => a ^ b,
                    };
                    (v, i2)
                }
            }
        }
        go(&self.nodes, 0, x).0
    }

    /// Replaces the subtree at `i` with a freshly grown one that fits the depth cap.
    pub fn mutate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for _ in 0..RETRY_BUDGET {
            let i = rng.gen_range(0..self.nodes.len());
            let at = node_depths(&self.nodes)[i];
            let room = (self.params.max_depth + 1).saturating_sub(at);
            if room == 0 {
                continue;
            }
            let limit = rng.gen_range(1..=room.min(self.params.init_max_depth));
            let mut fresh = Vec::new();
            build(self.n, limit, false, rng, &mut fresh);
            let end = subtree_end(&self.nodes, i);
            let mut nodes = Vec::with_capacity(self.nodes.len() - (end - i) + fresh.len());
            nodes.extend_from_slice(&self.nodes[..i]);
            nodes.extend_from_slice(&fresh);
            nodes.extend_from_slice(&self.nodes[end..]);
            if tree_depth(&nodes) <= self.params.max_depth {
                self.nodes = nodes;
                return;
            }
        }
    }

    /// One of the five crossover variants, chosen uniformly. Children deeper than
    /// the cap are rejected and the draw repeated; after [`RETRY_BUDGET`] failures
    /// the result is a copy of `self`.
    pub fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> Result<Self> {
        if self.n != other.n {
            return param(format!(
                "crossover of trees with n = {} and n = {}",
                self.n, other.n
            ));
        }
        for _ in 0..RETRY_BUDGET {
            let kind = TreeCrossover::ALL[rng.gen_range(0..TreeCrossover::ALL.len())];
            let nodes = kind.apply(&self.nodes, &other.nodes, rng);
            if tree_depth(&nodes) <= self.params.max_depth {
                return Ok(Self {
                    n: self.n,
                    nodes,
                    params: self.params,
                });
            }
        }
        Ok(self.clone())
    }

    /// Parses prefix notation such as `IF(x1, AND(x2, x3), NOT(x4))`.
    pub fn parse(text: &str, n: usize, params: GpParams) -> Result<Self> {
        let nodes = parse_prefix(text)?;
        Self::from_nodes(n, nodes, params)
    }

    /// Smallest `n` covering every variable that appears in the tree.
    pub fn min_vars(nodes: &[Node]) -> usize {
        nodes
            .iter()
            .filter_map(|node| match node {
                Node::Var(j) => Some(*j as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(1)
    }
}

/// The tree crossover variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeCrossover {
    /// Random subtree of the second parent replaces a random subtree of the first.
    Subtree,
    /// Walks the common region swapping node labels (interior) or whole
    /// subtrees (boundary) with probability 1/2.
    Uniform,
    /// Like `Subtree`, but the donated subtree has at most `2s + 1` nodes where
    /// `s` is the size of the replaced one.
    SizeFair,
    /// Crossover point drawn from the common region (same shape from the root).
    OnePoint,
    /// Crossover point drawn from the coordinates present in both trees.
    ContextPreserving,
}

impl TreeCrossover {
    pub const ALL: [TreeCrossover; 5] = [
        TreeCrossover::Subtree,
        TreeCrossover::Uniform,
        TreeCrossover::SizeFair,
        TreeCrossover::OnePoint,
        TreeCrossover::ContextPreserving,
    ];

    pub fn apply<R: Rng + ?Sized>(self, a: &[Node], b: &[Node], rng: &mut R) -> Vec<Node> {
        match self {
            TreeCrossover::Subtree => {
                let i = rng.gen_range(0..a.len());
                let j = rng.gen_range(0..b.len());
                splice(a, i, b, j)
            }
            TreeCrossover::SizeFair => {
                let i = rng.gen_range(0..a.len());
                let s = subtree_end(a, i) - i;
                let candidates: Vec<usize> = (0..b.len())
                    .filter(|&j| subtree_end(b, j) - j <= 2 * s + 1)
                    .collect();
                let j = candidates[rng.gen_range(0..candidates.len())];
                splice(a, i, b, j)
            }
            TreeCrossover::Uniform => {
                let mut out = Vec::with_capacity(a.len().max(b.len()));
                uniform(a, 0, b, 0, rng, &mut out);
                out
            }
            TreeCrossover::OnePoint | TreeCrossover::ContextPreserving => {
                let mut pairs = Vec::new();
                common_points(a, 0, b, 0, self == TreeCrossover::OnePoint, &mut pairs);
                let (i, j) = pairs[rng.gen_range(0..pairs.len())];
                splice(a, i, b, j)
            }
        }
    }
}

fn splice(a: &[Node], i: usize, b: &[Node], j: usize) -> Vec<Node> {
    let a_end = subtree_end(a, i);
    let b_end = subtree_end(b, j);
    let mut out = Vec::with_capacity(a.len() - (a_end - i) + (b_end - j));
    out.extend_from_slice(&a[..i]);
    out.extend_from_slice(&b[j..b_end]);
    out.extend_from_slice(&a[a_end..]);
    out
}

fn uniform<R: Rng + ?Sized>(
    a: &[Node],
    i: usize,
    b: &[Node],
    j: usize,
    rng: &mut R,
    out: &mut Vec<Node>,
) {
    let (na, nb) = (a[i], b[j]);
    if na.arity() == nb.arity() && na.arity() > 0 {
        out.push(if rng.gen_bool(0.5) { na } else { nb });
        for (ci, cj) in children(a, i).zip(children(b, j)) {
            uniform(a, ci, b, cj, rng, out);
        }
    } else if rng.gen_bool(0.5) {
        out.extend_from_slice(&a[i..subtree_end(a, i)]);
    } else {
        out.extend_from_slice(&b[j..subtree_end(b, j)]);
    }
}

/// Pairs of aligned positions. With `same_arity`, descent continues only below
/// nodes of equal arity (the common region); otherwise below every child slot
/// both nodes have.
fn common_points(
    a: &[Node],
    i: usize,
    b: &[Node],
    j: usize,
    same_arity: bool,
    out: &mut Vec<(usize, usize)>,
) {
    out.push((i, j));
    let (ka, kb) = (a[i].arity(), b[j].arity());
    if same_arity && ka != kb {
        return;
    }
    for (ci, cj) in children(a, i).zip(children(b, j)) {
        common_points(a, ci, b, cj, same_arity, out);
    }
}

fn parse_prefix(text: &str) -> Result<Vec<Node>> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        out: Vec::new(),
    };
    p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(p.out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    out: Vec<Node>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            line: 1,
            msg: format!("{msg} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<()> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .to_ascii_uppercase();
        let node = match word.as_str() {
            "OR" => Node::Or,
            "XOR" => Node::Xor,
            "AND" => Node::And,
            "IF" => Node::If,
            "NOT" => Node::Not,
            w if w.starts_with('X') => {
                let k: usize = w[1..].parse().map_err(|_| self.err("bad variable name"))?;
                if k == 0 || k > 255 {
                    return Err(self.err("variables are numbered from x1"));
                }
                Node::Var((k - 1) as u8)
            }
            _ => return Err(self.err("expected an operator or variable")),
        };
        self.out.push(node);
        if node.arity() > 0 {
            self.expect(b'(')?;
            for k in 0..node.arity() {
                if k > 0 {
                    self.expect(b',')?;
                }
                self.expr()?;
            }
            self.expect(b')')?;
        }
        Ok(())
    }
}

impl fmt::Display for GpGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(nodes: &[Node], i: usize, f: &mut fmt::Formatter<'_>) -> Result<usize, fmt::Error> {
            let node = nodes[i];
            if let Node::Var(j) = node {
                write!(f, "x{}", j + 1)?;
                return Ok(i + 1);
            }
            write!(f, "{}(", node.name())?;
            let mut next = i + 1;
            for k in 0..node.arity() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                next = go(nodes, next, f)?;
            }
            f.write_str(")")?;
            Ok(next)
        }
        go(&self.nodes, 0, f).map(|_| ())
    }
}
