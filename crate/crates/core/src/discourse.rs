//! Referent registry and anaphora resolution.

use thiserror::Error;

use crate::ulf::{AtomKind, Ulf};

/// Syntactic role of a mention, which sets its salience weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Subject,
    Object,
    /// A name that answered a wh-question.
    Answer,
}

impl Role {
    pub fn weight(self) -> f64 {
        match self {
            Role::Subject => 1.0,
            Role::Object => 0.5,
            Role::Answer => 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub name: String,
    pub turn: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscourseError {
    #[error("no referent for {0:?}")]
    UnresolvedReference(String),
}

#[derive(Debug, Clone, Default)]
pub struct DiscourseContext {
    entities: Vec<Entity>,
    turn: usize,
    last_answer: Option<Ulf>,
}

impl DiscourseContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn turn(&self) -> usize {
        self.turn
    }

    /// Entities, most salient first.
    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn last_answer(&self) -> Option<&Ulf> {
        self.last_answer.as_ref()
    }

    pub fn set_last_answer(&mut self, u: Ulf) {
        self.last_answer = Some(u);
    }

    pub fn salience(&self, e: &Entity) -> f64 {
        2.0 / (1.0 + (self.turn - e.turn) as f64) + e.weight
    }

    pub fn most_salient(&self) -> Option<&Entity> {
        self.entities.first()
    }

    pub fn next_turn(&mut self) {
        self.turn += 1;
        self.sort();
    }

    /// Adds or refreshes one mention. Within a turn the heavier role wins.
    pub fn mention(&mut self, name: &str, role: Role) {
        let (turn, w) = (self.turn, role.weight());
        match self.entities.iter_mut().find(|e| e.name == name) {
            Some(e) if e.turn == turn => e.weight = e.weight.max(w),
            Some(e) => {
                e.turn = turn;
                e.weight = w;
            }
            None => self.entities.push(Entity {
                name: name.to_string(),
                turn,
                weight: w,
            }),
        }
        self.sort();
    }

    /// Registers every name in `u`: names inside the subject are subjects,
    /// the rest objects; names in `answers` get the answer weight.
    pub fn register_entities(&mut self, u: &Ulf, answers: &[String]) {
        let subject = subject_of(u);
        let mut subj_names = Vec::new();
        if let Some(s) = subject {
            collect_names(s, &mut subj_names);
        }
        let mut all = Vec::new();
        collect_names(u, &mut all);
        for n in all {
            let role = if answers.contains(&n) {
                Role::Answer
            } else if subj_names.contains(&n) {
                Role::Subject
            } else {
                Role::Object
            };
            self.mention(&n, role);
        }
    }

    fn sort(&mut self) {
        let scores: Vec<(String, f64)> = self
            .entities
            .iter()
            .map(|e| (e.name.clone(), self.salience(e)))
            .collect();
        let score = |n: &str| scores.iter().find(|(m, _)| m == n).map_or(0.0, |(_, s)| *s);
        self.entities.sort_by(|a, b| {
            score(&b.name)
                .total_cmp(&score(&a.name))
                .then(b.turn.cmp(&a.turn))
                .then(a.name.cmp(&b.name))
        });
    }

    /// Replaces `it.pro` and demonstrative block phrases with name atoms.
    /// A pronoun inside an embedded clause first tries the matrix subject.
    pub fn resolve_anaphora(&self, u: &Ulf) -> Result<Ulf, DiscourseError> {
        if !u.contains(&|x: &Ulf| is_anaphor(x)) {
            return Ok(u.clone());
        }
        let matrix = subject_of(u).and_then(single_name);
        let mut unresolved = None;
        let out = resolve_in(u, false, matrix.as_deref(), self, &mut unresolved);
        match unresolved {
            Some(p) => Err(DiscourseError::UnresolvedReference(p)),
            None => Ok(out),
        }
    }
}

fn resolve_in(
    u: &Ulf,
    embedded: bool,
    matrix: Option<&str>,
    ctx: &DiscourseContext,
    unresolved: &mut Option<String>,
) -> Ulf {
    if is_anaphor(u) {
        let pick = if embedded { matrix } else { None }
            .map(String::from)
            .or_else(|| ctx.most_salient().map(|e| e.name.clone()));
        return match pick {
            Some(n) => Ulf::name(&n),
            None => {
                unresolved.get_or_insert_with(|| anaphor_text(u));
                u.clone()
            }
        };
    }
    match u {
        Ulf::Atom(_) => u.clone(),
        Ulf::List(items) => {
            let inner = embedded
                || items
                    .first()
                    .and_then(|h| h.as_atom())
                    .is_some_and(|a| a.kind() == &AtomKind::AdverbialOp);
            Ulf::List(
                items
                    .iter()
                    .map(|x| resolve_in(x, inner, matrix, ctx, unresolved))
                    .collect(),
            )
        }
    }
}

fn is_anaphor(u: &Ulf) -> bool {
    match u {
        Ulf::Atom(a) => a.is("it.pro"),
        Ulf::List(items) => {
            items.len() == 2
                && (items[0].as_atom().is_some_and(|a| a.is("that.d") || a.is("this.d")))
                && items[1].is_atom("block.n")
        }
    }
}

fn anaphor_text(u: &Ulf) -> String {
    match u {
        Ulf::Atom(_) => "it".into(),
        _ => "that block".into(),
    }
}

/// The subject constituent of a question or declarative ULF.
pub fn subject_of(u: &Ulf) -> Option<&Ulf> {
    let items = u.as_list()?;
    // strip the final punctuation
    let s = match items {
        [s, p] if p.kind() == Some(&AtomKind::Punct) => s,
        _ => u,
    };
    let parts = s.as_list()?;
    let head = parts.first()?;
    let head_is_aux = head
        .as_list()
        .and_then(|h| h.first())
        .is_some_and(|t| t.kind() == Some(&AtomKind::TenseOp));
    if head_is_aux {
        parts.get(1)
    } else if parts.len() == 2 {
        Some(head)
    } else {
        None
    }
}

fn collect_names(u: &Ulf, out: &mut Vec<String>) {
    for a in u.atoms() {
        if let Some(n) = a.name_text() {
            if !n.starts_with("Now") && !out.iter().any(|m| m == n) {
                out.push(n.to_string());
            }
        }
    }
}

fn single_name(u: &Ulf) -> Option<String> {
    let mut names = Vec::new();
    collect_names(u, &mut names);
    match names.as_slice() {
        [n] => Some(n.clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulf(s: &str) -> Ulf {
        s.parse().unwrap()
    }

    #[test]
    fn answer_mention_makes_it_resolvable() {
        let mut ctx = DiscourseContext::new();
        ctx.register_entities(&ulf("(you.pro ((past move.v) (the.d (|Toyota| block.n))))"), &["Toyota".into()]);
        ctx.next_turn();
        let q = ulf("((it.pro ((pres be.v) where.pq)) ?)");
        assert_eq!(
            ctx.resolve_anaphora(&q).unwrap().to_string(),
            "((|Toyota| ((pres be.v) where.pq)) ?)"
        );
    }

    #[test]
    fn empty_context_leaves_it_unresolved() {
        let ctx = DiscourseContext::new();
        let q = ulf("((it.pro ((pres be.v) where.pq)) ?)");
        assert_eq!(
            ctx.resolve_anaphora(&q),
            Err(DiscourseError::UnresolvedReference("it".into()))
        );
    }

    #[test]
    fn no_names_only_advances_turn() {
        let mut ctx = DiscourseContext::new();
        ctx.register_entities(&ulf("((what.pro ((pres be.v) where.pq)) ?)"), &[]);
        ctx.next_turn();
        assert!(ctx.entities().is_empty());
        assert_eq!(ctx.turn(), 1);
    }

    #[test]
    fn subject_outranks_object() {
        let mut ctx = DiscourseContext::new();
        ctx.register_entities(
            &ulf("(((the.d (|A| block.n)) ((past be.v) (on.p (the.d (|B| block.n))))) ?)"),
            &[],
        );
        let names: Vec<_> = ctx.entities().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["A", "B"]);
        // 2/(1+0) + 1.0 against 2/(1+0) + 0.5
        assert_eq!(ctx.salience(&ctx.entities()[0]), 3.0);
        assert_eq!(ctx.salience(&ctx.entities()[1]), 2.5);
    }

    #[test]
    fn that_block_prefers_recent() {
        let mut ctx = DiscourseContext::new();
        ctx.mention("Old", Role::Subject);
        ctx.next_turn();
        ctx.next_turn();
        ctx.mention("New", Role::Object);
        let q = ulf("((((past do.aux-s) (that.d block.n) (move.v)) ?))");
        let r = ctx.resolve_anaphora(&q).unwrap();
        assert!(r.to_string().contains("|New|"));
    }

    #[test]
    fn embedded_it_prefers_matrix_subject() {
        let mut ctx = DiscourseContext::new();
        ctx.mention("Toyota", Role::Answer);
        let q = ulf(
            "(((the.d (|Target| block.n)) ((past touch.v) (which.d (plur block.n)) (adv-s (before.ps (it.pro (past move.v)))))) ?)",
        );
        let r = ctx.resolve_anaphora(&q).unwrap().to_string();
        assert!(r.contains("(before.ps (|Target| (past move.v)))"), "{r}");
    }

    #[test]
    fn resolution_is_noop_without_anaphora() {
        let ctx = DiscourseContext::new();
        let q = ulf("(((which.d block.n) ((past move.v) (adv-e (just.mod-a recent.a)))) ?)");
        assert_eq!(ctx.resolve_anaphora(&q).unwrap(), q);
    }
}
