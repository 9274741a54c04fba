//! Quivers, relations and the line-based algebra file format.

use crate::scalar::{FieldSpec, Scalar};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

/// Finite quiver. Vertex and arrow order is file order; it anchors every
/// deterministic choice downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    /// Source vertex of an arrow path (arrows composed left to right).
    pub fn path_src(&self, path: &[usize]) -> usize {
        self.arrows[path[0]].src
    }

    pub fn path_tgt(&self, path: &[usize]) -> usize {
        self.arrows[*path.last().unwrap()].tgt
    }

    /// Checks that consecutive arrows compose (target meets source).
    pub fn path_is_composable(&self, path: &[usize]) -> bool {
        path.windows(2).all(|w| self.arrows[w[0]].tgt == self.arrows[w[1]].src)
    }

    pub fn opposite(&self) -> Quiver {
        Quiver {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| Arrow {
                    name: a.name.clone(),
                    src: a.tgt,
                    tgt: a.src,
                })
                .collect(),
        }
    }

    /// Connected components of the underlying graph, as vertex sets.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut comp = vec![usize::MAX; n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in &self.arrows {
            adj[a.src].push(a.tgt);
            adj[a.tgt].push(a.src);
        }
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn path_display(&self, path: &[usize]) -> String {
        path.iter()
            .map(|&a| self.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A relation: a k-linear combination of parallel paths of length >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

impl Relation {
    pub fn src(&self, q: &Quiver) -> usize {
        q.path_src(&self.terms[0].1)
    }

    pub fn tgt(&self, q: &Quiver) -> usize {
        q.path_tgt(&self.terms[0].1)
    }

    pub fn reversed(&self) -> Relation {
        Relation {
            terms: self
                .terms
                .iter()
                .map(|(c, p)| (c.clone(), p.iter().rev().cloned().collect()))
                .collect(),
        }
    }

    pub fn display(&self, q: &Quiver) -> String {
        self.terms
            .iter()
            .map(|(c, p)| format!("{}*{}", c, q.path_display(p)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Parses the algebra file format:
///
/// ```text
/// # comment
/// field Q | field F <prime>
/// vertex <label> [<label> ...]
/// arrow <name> <source> <target>
/// rel <coeff>*<a1>.<a2>[.<a3>...] [+ <coeff>*<path> ...]
/// rel rad2
/// ```
pub fn parse_spec(text: &str) -> Result<(Quiver, Vec<Relation>, FieldSpec), ParseError> {
    let mut field: Option<FieldSpec> = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut arrows: Vec<Arrow> = Vec::new();
    // relations are resolved after all arrows are known would be simpler, but
    // file order demands arrows precede the rels that use them anyway
    let mut raw_rels: Vec<(usize, String)> = Vec::new();

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let head = it.next().unwrap();
        match head {
            "field" => {
                let kind = it.next().ok_or_else(|| err(ln, "missing field kind"))?;
                field = Some(match kind {
                    "Q" => FieldSpec::Rationals,
                    "F" => {
                        let p: u64 = it
                            .next()
                            .ok_or_else(|| err(ln, "missing prime modulus"))?
                            .parse()
                            .map_err(|_| err(ln, "invalid prime modulus"))?;
                        if !is_prime(p) || p >= (1 << 31) {
                            return Err(err(ln, format!("invalid field descriptor: F {}", p)));
                        }
                        FieldSpec::Prime(p)
                    }
                    other => return Err(err(ln, format!("unknown field `{}`", other))),
                });
            }
            "vertex" => {
                for v in it {
                    if vertices.iter().any(|x| x == v) {
                        return Err(err(ln, format!("duplicate vertex `{}`", v)));
                    }
                    vertices.push(v.to_string());
                }
            }
            "arrow" => {
                let name = it.next().ok_or_else(|| err(ln, "missing arrow name"))?;
                let s = it.next().ok_or_else(|| err(ln, "missing arrow source"))?;
                let t = it.next().ok_or_else(|| err(ln, "missing arrow target"))?;
                if arrows.iter().any(|a| a.name == name) {
                    return Err(err(ln, format!("duplicate arrow `{}`", name)));
                }
                let src = vertices
                    .iter()
                    .position(|v| v == s)
                    .ok_or_else(|| err(ln, format!("unknown vertex `{}`", s)))?;
                let tgt = vertices
                    .iter()
                    .position(|v| v == t)
                    .ok_or_else(|| err(ln, format!("unknown vertex `{}`", t)))?;
                arrows.push(Arrow {
                    name: name.to_string(),
                    src,
                    tgt,
                });
            }
            "rel" => {
                let rest = line[3..].trim().to_string();
                if rest.is_empty() {
                    return Err(err(ln, "empty relation"));
                }
                raw_rels.push((ln, rest));
            }
            other => return Err(err(ln, format!("unknown directive `{}`", other))),
        }
    }

    let field = field.ok_or_else(|| err(0, "missing `field` line"))?;
    let quiver = Quiver { vertices, arrows };
    let mut relations = Vec::new();

    for (ln, body) in raw_rels {
        if body == "rad2" {
            // one single-term relation per composable length-2 path
            for (i, a) in quiver.arrows.iter().enumerate() {
                for (j, b) in quiver.arrows.iter().enumerate() {
                    if a.tgt == b.src {
                        relations.push(Relation {
                            terms: vec![(field.one(), vec![i, j])],
                        });
                    }
                }
            }
            continue;
        }
        let mut terms = Vec::new();
        for term in body.split('+').map(str::trim) {
            let (coeff, path) = term
                .split_once('*')
                .ok_or_else(|| err(ln, format!("expected `coeff*path` in `{}`", term)))?;
            let c = field
                .parse_scalar(coeff)
                .ok_or_else(|| err(ln, format!("invalid coefficient `{}`", coeff)))?;
            if c.is_zero() {
                return Err(err(ln, "zero coefficient in relation"));
            }
            let arrows: Result<Vec<usize>, ParseError> = path
                .split('.')
                .map(|a| {
                    quiver
                        .arrow_index(a.trim())
                        .ok_or_else(|| err(ln, format!("unknown arrow `{}`", a)))
                })
                .collect();
            let arrows = arrows?;
            if arrows.len() < 2 {
                return Err(err(ln, "relation path must have length >= 2"));
            }
            if !quiver.path_is_composable(&arrows) {
                return Err(err(ln, format!("path `{}` does not compose", path)));
            }
            terms.push((c, arrows));
        }
        let (s0, t0) = (
            quiver.path_src(&terms[0].1),
            quiver.path_tgt(&terms[0].1),
        );
        for (_, p) in &terms[1..] {
            if quiver.path_src(p) != s0 || quiver.path_tgt(p) != t0 {
                return Err(err(ln, "relation terms are not parallel"));
            }
        }
        relations.push(Relation { terms });
    }

    Ok((quiver, relations, field))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const EX22B: &str = "\
# five-vertex chain bound by radical square zero
field Q
vertex 1 2 3 4 5
arrow b1 2 1
arrow b2 3 2
arrow b3 4 3
arrow b4 5 4
rel rad2
";

    #[test]
    fn parses_chain_with_rad2_macro() {
        let (q, rels, field) = parse_spec(EX22B).unwrap();
        assert_eq!(field, FieldSpec::Rationals);
        assert_eq!(q.n_vertices(), 5);
        assert_eq!(q.n_arrows(), 4);
        // composable length-2 paths: b2.b1, b3.b2, b4.b3
        assert_eq!(rels.len(), 3);
        let shown: Vec<String> = rels.iter().map(|r| r.display(&q)).collect();
        assert_eq!(shown, vec!["1*b2.b1", "1*b3.b2", "1*b4.b3"]);
    }

    #[test]
    fn parses_one_vertex_and_kronecker() {
        let (q, rels, _) = parse_spec("field Q\nvertex 1\n").unwrap();
        assert_eq!((q.n_vertices(), q.n_arrows(), rels.len()), (1, 0, 0));

        let (q, rels, _) =
            parse_spec("field Q\nvertex 1 2\narrow a 1 2\narrow b 1 2\n").unwrap();
        assert_eq!((q.n_vertices(), q.n_arrows(), rels.len()), (2, 2, 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_spec("field Q\nvertex 1\narrow a 1 9\n").is_err());
        assert!(parse_spec("field Q\nvertex 1 2\narrow a 1 2\nrel 0*a.a\n").is_err());
        assert!(parse_spec("field F 6\nvertex 1\n").is_err());
        // non-parallel terms
        let e = parse_spec(
            "field Q\nvertex 1 2 3\narrow a 1 2\narrow b 2 3\narrow c 2 1\nrel 1*a.b + 1*a.c\n",
        );
        assert!(e.is_err());
        // line numbers surface in messages
        let msg = parse_spec("field Q\nvertex 1\nbogus x\n").unwrap_err().to_string();
        assert!(msg.contains("line 3"));
    }
}
