use std::collections::BTreeMap;
use std::path::Path;

use crate::ulf::{parse_all, AtomKind, Ulf};

use super::lexicon::line_of;
use super::pattern::{Pattern, PatternElem};
use super::LoadError;

/// Contiguous 1-based range of bound spans, `first..=last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanRef {
    pub first: usize,
    pub last: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dispatch {
    /// Transduce the span with the named tree.
    Tree { name: String, span: SpanRef },
    /// Lexical ULF of a one-word span.
    Lex { span: SpanRef },
    /// The word's lexical stem (or the word itself) retyped with `suffix`:
    /// `three` as `three.a`, `till` as `until.ps`.
    LexAs { suffix: String, span: SpanRef },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    /// ULF result; `#k` atoms stand for the lexical ULF of span k.
    Template(Ulf),
    /// Word-sequence result; `#k` atoms splice span k's words.
    Words(Vec<Ulf>),
    Subtree { tree: String, span: SpanRef },
    /// Dispatch spans to child trees, then assemble with the index template
    /// or, without one, by concatenation.
    Compose { dispatch: Vec<Dispatch>, indices: Option<Ulf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub pattern: Pattern,
    pub children: Vec<Node>,
    pub terminal: Option<Terminal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransductionTree {
    pub name: String,
    pub roots: Vec<Node>,
}

/// Named trees, immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct TreeSet {
    trees: BTreeMap<String, TransductionTree>,
    order: Vec<String>,
}

impl TreeSet {
    pub fn get(&self, name: &str) -> Option<&TransductionTree> {
        self.trees.get(name)
    }

    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Parses one or more tree files' worth of `(deftree ...)` forms.
    pub fn parse(text: &str) -> Result<TreeSet, LoadError> {
        let mut set = TreeSet::default();
        set.add_source(text)?;
        set.validate()?;
        Ok(set)
    }

    /// Loads a single file, or every `*.trees` file of a directory in name order.
    pub fn load(path: &Path) -> Result<TreeSet, LoadError> {
        let mut set = TreeSet::default();
        if path.is_dir() {
            let mut files: Vec<_> = std::fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "trees"))
                .collect();
            files.sort();
            for f in files {
                set.add_source(&std::fs::read_to_string(f)?)?;
            }
        } else {
            set.add_source(&std::fs::read_to_string(path)?)?;
        }
        set.validate()?;
        Ok(set)
    }

    fn add_source(&mut self, text: &str) -> Result<(), LoadError> {
        let forms = parse_all(text).map_err(|e| LoadError::Syntax {
            line: line_of(text, e.position().unwrap_or(0)),
            message: e.to_string(),
        })?;
        for (offset, form) in forms {
            let line = line_of(text, offset);
            let tree = parse_deftree(&form).map_err(|message| LoadError::Syntax { line, message })?;
            if self.trees.contains_key(&tree.name) {
                return Err(LoadError::DuplicateTree(tree.name));
            }
            self.order.push(tree.name.clone());
            self.trees.insert(tree.name.clone(), tree);
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), LoadError> {
        if self.trees.is_empty() {
            return Err(LoadError::EmptyTreeSet);
        }
        for t in self.trees.values() {
            for n in &t.roots {
                self.validate_node(n)?;
            }
        }
        Ok(())
    }

    fn validate_node(&self, n: &Node) -> Result<(), LoadError> {
        let check = |name: &str| {
            if self.trees.contains_key(name) {
                Ok(())
            } else {
                Err(LoadError::DanglingSubtree(name.to_string()))
            }
        };
        match &n.terminal {
            Some(Terminal::Subtree { tree, .. }) => check(tree)?,
            Some(Terminal::Compose { dispatch, .. }) => {
                for d in dispatch {
                    if let Dispatch::Tree { name, .. } = d {
                        check(name)?;
                    }
                }
            }
            _ => {}
        }
        n.children.iter().try_for_each(|c| self.validate_node(c))
    }
}

fn atom_text(u: &Ulf) -> Option<&str> {
    u.as_atom().map(|a| a.surface())
}

fn parse_deftree(form: &Ulf) -> Result<TransductionTree, String> {
    let items = form.as_list().ok_or("expected (deftree NAME NODE...)")?;
    if !items[0].is_atom("deftree") || items.len() < 3 {
        return Err("expected (deftree NAME NODE...)".into());
    }
    let name = atom_text(&items[1]).ok_or("tree name must be an atom")?.to_string();
    let roots = items[2..].iter().map(parse_node).collect::<Result<_, _>>()?;
    Ok(TransductionTree { name, roots })
}

fn parse_node(form: &Ulf) -> Result<Node, String> {
    let items = form.as_list().ok_or("expected (node PATTERN ...)")?;
    if !items[0].is_atom("node") || items.len() < 2 {
        return Err(format!("expected (node PATTERN ...), got {form}"));
    }
    let pattern = parse_pattern(&items[1])?;
    let width = pattern.elements.len();
    let mut children = Vec::new();
    let mut terminal = None;
    for item in &items[2..] {
        let parts = item.as_list().ok_or_else(|| format!("unexpected atom {item} in node"))?;
        if parts[0].is_atom("children") {
            for c in &parts[1..] {
                children.push(parse_node(c)?);
            }
        } else {
            if terminal.is_some() {
                return Err("node has more than one terminal".into());
            }
            terminal = Some(parse_terminal(item, width)?);
        }
    }
    if children.is_empty() && terminal.is_none() {
        return Err(format!("node {pattern} has neither children nor terminal"));
    }
    Ok(Node {
        pattern,
        children,
        terminal,
    })
}

fn parse_pattern(u: &Ulf) -> Result<Pattern, String> {
    if u.is_atom("empty") {
        return Ok(Pattern::default());
    }
    let items = u.as_list().ok_or_else(|| format!("bad pattern {u}"))?;
    let mut elements = Vec::new();
    for e in items {
        let a = e.as_atom().ok_or_else(|| format!("pattern elements must be atoms: {u}"))?;
        let s = a.surface();
        elements.push(if let Some(phrase) = a.name_text() {
            PatternElem::Literal(phrase.to_lowercase())
        } else if a.kind() == &AtomKind::Numeral {
            PatternElem::Wildcard(s.parse().map_err(|_| format!("bad wildcard bound {s}"))?)
        } else if let Some(f) = s.strip_prefix('@') {
            PatternElem::Feature(f.to_string())
        } else {
            PatternElem::Literal(s.to_lowercase())
        });
    }
    Ok(Pattern { elements })
}

fn parse_span(args: &[Ulf], width: usize) -> Result<SpanRef, String> {
    let num = |u: &Ulf| -> Result<usize, String> {
        atom_text(u)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad span index {u}"))
    };
    let first = num(args.first().ok_or("missing span index")?)?;
    let last = match args.get(1) {
        Some(u) => num(u)?,
        None => first,
    };
    if first == 0 || last < first || last > width {
        return Err(format!("span {first}..{last} outside pattern of width {width}"));
    }
    Ok(SpanRef { first, last })
}

fn span_refs_ok(u: &Ulf, width: usize) -> bool {
    u.atoms().iter().all(|a| match a.surface().strip_prefix('#') {
        Some(k) => k.parse::<usize>().is_ok_and(|k| k >= 1 && k <= width),
        None => true,
    })
}

fn parse_terminal(u: &Ulf, width: usize) -> Result<Terminal, String> {
    let items = u.as_list().ok_or("bad terminal")?;
    let head = atom_text(&items[0]).ok_or("bad terminal")?;
    match head {
        "template" => {
            let body = match items.len() {
                2 => items[1].clone(),
                _ => return Err("template takes one expression".into()),
            };
            if !span_refs_ok(&body, width) {
                return Err(format!("template {body} refers past the pattern"));
            }
            Ok(Terminal::Template(body))
        }
        "words" => {
            let ws = items[1..].to_vec();
            if !ws.iter().all(|w| w.as_atom().is_some() && span_refs_ok(w, width)) {
                return Err("words takes atoms and in-range #k references".into());
            }
            Ok(Terminal::Words(ws))
        }
        "subtree" => {
            let tree = atom_text(items.get(1).ok_or("subtree needs a tree name")?)
                .ok_or("subtree needs a tree name")?
                .to_string();
            Ok(Terminal::Subtree {
                tree,
                span: parse_span(&items[2..], width)?,
            })
        }
        "compose" => {
            let mut dispatch = Vec::new();
            let mut indices = None;
            for part in &items[1..] {
                let p = part.as_list().ok_or("compose parts must be lists")?;
                match atom_text(&p[0]) {
                    Some("dispatch") => {
                        for d in &p[1..] {
                            dispatch.push(parse_dispatch(d, width)?);
                        }
                    }
                    Some("indices") if p.len() == 2 => indices = Some(p[1].clone()),
                    _ => return Err(format!("unknown compose part {part}")),
                }
            }
            if dispatch.is_empty() {
                return Err("compose without dispatch".into());
            }
            if let Some(ix) = &indices {
                check_indices(ix, dispatch.len())?;
            }
            Ok(Terminal::Compose { dispatch, indices })
        }
        other => Err(format!("unknown terminal {other}")),
    }
}

fn parse_dispatch(u: &Ulf, width: usize) -> Result<Dispatch, String> {
    let p = u.as_list().ok_or_else(|| format!("bad dispatch {u}"))?;
    let head = atom_text(&p[0]).ok_or_else(|| format!("bad dispatch {u}"))?;
    match head {
        "lex" => Ok(Dispatch::Lex {
            span: parse_span(&p[1..], width)?,
        }),
        "lex-as" => {
            let suffix = atom_text(p.get(1).ok_or("lex-as needs a suffix")?)
                .ok_or("lex-as needs a suffix")?
                .to_string();
            Ok(Dispatch::LexAs {
                suffix,
                span: parse_span(&p[2..], width)?,
            })
        }
        name => Ok(Dispatch::Tree {
            name: name.to_string(),
            span: parse_span(&p[1..], width)?,
        }),
    }
}

pub(crate) fn index_ref(a: &str) -> Option<(bool, usize)> {
    let (splice, digits) = match a.strip_prefix('@') {
        Some(d) => (true, d),
        None => (false, a),
    };
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().map(|k| (splice, k))
}

fn check_indices(u: &Ulf, n: usize) -> Result<(), String> {
    for a in u.atoms() {
        if let Some((_, k)) = index_ref(a.surface()) {
            if k == 0 || k > n {
                return Err(format!("index {k} outside {n} dispatched constituents"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source_is_rejected() {
        assert!(matches!(TreeSet::parse("; nothing\n"), Err(LoadError::EmptyTreeSet)));
    }

    #[test]
    fn dangling_subtree_is_rejected() {
        let src = "(deftree top (node (0) (subtree np-tree 1)))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::DanglingSubtree(n)) if n == "np-tree"));
        let src = "(deftree top (node (0) (compose (dispatch (np-tree 1)))))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::DanglingSubtree(n)) if n == "np-tree"));
    }

    #[test]
    fn duplicate_tree_is_rejected() {
        let src = "(deftree a (node (0) (template x)))\n(deftree a (node (0) (template y)))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::DuplicateTree(n)) if n == "a"));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let src = "(deftree a (node (0) (template x)))\n\n(deftree b (node (0) (frobnicate)))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::Syntax { line: 3, .. })));
        let src = "(deftree a\n (node (0) (template x))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::Syntax { line: 2, .. })));
        let src = "(deftree a (node (0 move) (subtree a 3)))";
        assert!(matches!(TreeSet::parse(src), Err(LoadError::Syntax { .. })));
    }

    #[test]
    fn parses_all_terminal_forms() {
        let src = r#"
            (deftree t
              (node (@wh-det 0 move)
                (children
                  (node (which 0 move) (compose (dispatch (lex 1) (n 2) (lex-as v 3)) (indices ((1 2) 3)))))
                (template (#1 #3)))
              (node empty (template nil))
              (node (0) (words hello #1)))
            (deftree n (node (0) (subtree t 1)))"#;
        let set = TreeSet::parse(src).unwrap();
        assert_eq!(set.names(), ["t", "n"]);
        let t = set.get("t").unwrap();
        assert_eq!(t.roots.len(), 3);
        assert_eq!(t.roots[0].children.len(), 1);
        assert!(t.roots[1].pattern.elements.is_empty());
    }
}
