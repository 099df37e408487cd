//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bwqa_core::hqa::constraint::{apply_frequency, filter_binary, filter_unary, BinaryRel, Frequency, ModA, UnaryPred};
use bwqa_core::memory::Clock;
use bwqa_core::session::{replay, EventKind};
use bwqa_core::transduction::{bundled, parse_question, TOP_TREE};
use bwqa_core::world::{Color, WorldBlock, WorldFile};
use bwqa_core::{print_sexpr, MoveOutcome, Point3, Session, TimeToken, World};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIALOGUE: &str = include_str!("../fixtures/dialogue.jsonl");
const CORPUS: &str = include_str!("../data/corpus.txt");
const LOGO_ROW: &str = include_str!("../data/worlds/logo-row.json");
const TOUCH_HISTORY: &str = include_str!("../data/worlds/touch-history.json");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("dialogue-replay", dialogue_replay),
        ("corpus-parse-rate", corpus_parse_rate),
        ("scene-reconstruction", scene_reconstruction),
        ("temporal-filters", temporal_filters),
        ("touch-history-sets", touch_history_sets),
        ("presupposition-negation", presupposition_negation),
        ("fuzzed-asks", fuzzed_asks),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn dialogue_replay() -> Outcome {
    const EXPECTED: [&str; 7] = [
        "You moved the Toyota block.",
        "The Toyota block was between the Mercedes block and the Burger King block.",
        "The Toyota block is on top of the Texaco block.",
        "You moved two blocks.",
        "No.",
        "Yes.",
        "You moved the Toyota block three minutes ago.",
    ];
    let start = Instant::now();
    let report = replay(DIALOGUE).map_err(|e| e.to_string())?;
    let took = within(start, Duration::from_secs(1), "replay")?;
    ensure(report.checks.len() == EXPECTED.len(), || format!("{} asks replayed", report.checks.len()))?;
    for (c, want) in report.checks.iter().zip(EXPECTED) {
        ensure(c.actual == want, || format!("{:?}: got {:?}, want {want:?}", c.question, c.actual))?;
        ensure(c.matches(), || format!("{:?}: recorded answer differs", c.question))?;
    }
    let saved = report.session.to_jsonl();
    ensure(saved == DIALOGUE, || "regenerated transcript differs from fixture".into())?;
    Ok(format!("{} answers identical, transcript byte-identical, {took:?}", EXPECTED.len()))
}

fn corpus_parse_rate() -> Outcome {
    let world = World::from_json(LOGO_ROW).map_err(|e| e.to_string())?;
    let mut t = bundled();
    for b in world.block_names() {
        t.lexicon_mut().add_block_name(b);
    }
    let questions: Vec<&str> = CORPUS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    ensure(questions.len() >= 120, || format!("corpus has only {} questions", questions.len()))?;
    let parsed = questions.iter().filter(|q| parse_question(q, TOP_TREE, &t).is_ok()).count();
    let rate = parsed as f64 / questions.len() as f64;
    ensure(rate >= 0.94, || format!("{parsed}/{} parsed ({:.1}%)", questions.len(), rate * 100.0))?;
    let want = "(((Which.d (plur block.n)) ((pres be.v) (on.p (two.d (other.a (plur block.n)))))) ?)";
    let got = parse_question("Which blocks are on two other blocks?", TOP_TREE, &t)
        .map(|u| print_sexpr(&u))
        .map_err(|e| e.to_string())?;
    ensure(got == want, || format!("reference parse was {got}"))?;
    Ok(format!("{parsed}/{} parsed ({:.1}%), reference ULF exact", questions.len(), rate * 100.0))
}

const NAMES: [&str; 8] = ["Twitter", "Mercedes", "Toyota", "Burger King", "Texaco", "McDonald's", "Starbucks", "Target"];

fn grid_point(rng: &mut ChaCha8Rng) -> Point3 {
    let cell = |r: &mut ChaCha8Rng| -0.6 + 0.2 * r.random_range(0..7) as f64;
    Point3::new(cell(rng), cell(rng), 0.075)
}

fn random_world(rng: &mut ChaCha8Rng) -> WorldFile {
    let n = rng.random_range(2..=8);
    let mut used = HashSet::new();
    let mut blocks = Vec::new();
    for name in &NAMES[..n] {
        let p = loop {
            let p = grid_point(rng);
            if used.insert(((p.x * 10.0).round() as i32, (p.y * 10.0).round() as i32)) {
                break p;
            }
        };
        blocks.push(WorldBlock {
            name: name.to_string(),
            color: *[Color::Red, Color::Green, Color::Blue].choose(rng).unwrap(),
            position: p,
        });
    }
    WorldFile {
        blocks,
        side: 0.15,
        table: [1.5, 1.5],
    }
}

fn scene_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = Instant::now();
    let (mut recorded, mut checked) = (0, 0);
    for run in 0..200 {
        let file = random_world(&mut rng);
        let world = World::from_file(&file).map_err(|e| format!("session {run}: {e}"))?;
        let names: Vec<String> = world.block_names().map(String::from).collect();
        let mut session = Session::new(world);
        let mut live: BTreeMap<String, Point3> = file.blocks.iter().map(|b| (b.name.clone(), b.position)).collect();
        let mut snapshots = vec![live.clone()];
        let mut clocks: Vec<Clock> = vec![0.0];
        let mut clock = 0.0;
        for _ in 0..rng.random_range(0..=50) {
            clock += rng.random_range(0.0..5.0);
            let block = names.choose(&mut rng).unwrap().clone();
            let to = if rng.random_bool(0.2) {
                let base = live[names.choose(&mut rng).unwrap()];
                Point3::new(base.x, base.y, base.z + 0.15)
            } else {
                grid_point(&mut rng)
            };
            if let Ok(MoveOutcome::Recorded { .. }) = session.handle_move(&block, to, clock) {
                live.insert(block, to);
                snapshots.push(live.clone());
                clocks.push(clock);
                recorded += 1;
            }
        }
        let memory = session.memory();
        let tokens: &[TimeToken] = memory.times();
        ensure(tokens.len() == 2 * snapshots.len() - 1, || format!("session {run}: {} tokens", tokens.len()))?;
        for tok in tokens {
            let moves_before = tok.index / 2;
            let want = &snapshots[moves_before];
            let got = memory.reconstruct_scene(tok.index).map_err(|e| format!("session {run}: {e}"))?;
            ensure(got.positions() == want, || format!("session {run}: scene differs at token {}", tok.index))?;
            let want_clock = clocks[tok.index.div_ceil(2)];
            ensure(tok.clock == want_clock, || format!("session {run}: clock differs at token {}", tok.index))?;
            checked += 1;
        }
    }
    let took = within(start, Duration::from_secs(10), "200 sessions")?;
    Ok(format!("200 sessions, {recorded} moves, {checked} token scenes match snapshots, {took:?}"))
}

fn random_subset(rng: &mut ChaCha8Rng, upto: usize) -> Vec<usize> {
    let p = rng.random_range(0.1..0.9);
    (0..=upto).rev().filter(|_| rng.random_bool(p)).collect()
}

fn binary_oracle(candidates: &[usize], rel: BinaryRel, objects: &[usize], mod_a: Option<ModA>) -> Option<Vec<usize>> {
    let newest = *objects.iter().max()?;
    let refs: Vec<usize> = if mod_a == Some(ModA::Ever) { objects.to_vec() } else { vec![newest] };
    let holds = |t: usize, o: usize| match rel {
        BinaryRel::Before => t < o,
        BinaryRel::After => t > o,
        BinaryRel::Since => t >= o,
        BinaryRel::Until => t <= o,
        BinaryRel::During => t == o,
    };
    let kept: Vec<usize> = candidates.iter().copied().filter(|&t| refs.iter().any(|&o| holds(t, o))).collect();
    if matches!(mod_a, Some(ModA::Just | ModA::Right)) {
        return Some(kept.iter().copied().min_by_key(|&t| t.abs_diff(newest)).into_iter().collect());
    }
    Some(kept)
}

fn unary_oracle(candidates: &[usize], pred: UnaryPred, mod_a: Option<ModA>, clocks: &[Clock], now: Clock) -> Vec<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    match pred {
        UnaryPred::First | UnaryPred::Initial => sorted.first().copied().into_iter().collect(),
        UnaryPred::Last => sorted.last().copied().into_iter().collect(),
        UnaryPred::Recent => {
            let newest = clocks.len() - 1;
            let recent: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&t| newest - t <= 2 || now - clocks[t] <= 60.0)
                .collect();
            if matches!(mod_a, Some(ModA::Just | ModA::Right)) {
                recent.iter().max().copied().into_iter().collect()
            } else {
                recent
            }
        }
    }
}

fn frequency_oracle(candidates: &[usize], facts: &BTreeMap<usize, Vec<u8>>, f: Frequency) -> BTreeMap<usize, Vec<u8>> {
    let need = match f {
        Frequency::AtLeast(n) => n,
        Frequency::Always => candidates.len(),
    }
    .max(1);
    let occurrences = |x: u8| candidates.iter().filter(|c| facts.get(c).is_some_and(|v| v.contains(&x))).count();
    candidates
        .iter()
        .filter_map(|c| {
            let kept: Vec<u8> = facts.get(c)?.iter().copied().filter(|&x| occurrences(x) >= need).collect();
            (!kept.is_empty()).then_some((*c, kept))
        })
        .collect()
}

fn temporal_filters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf117e5);
    let rels = [BinaryRel::Before, BinaryRel::After, BinaryRel::During, BinaryRel::Since, BinaryRel::Until];
    let mods = [None, Some(ModA::Ever), Some(ModA::Just), Some(ModA::Right)];
    let preds = [UnaryPred::Recent, UnaryPred::First, UnaryPred::Last, UnaryPred::Initial];
    for case in 0..1000 {
        let k = rng.random_range(0..30);
        let candidates = random_subset(&mut rng, k);
        let objects = random_subset(&mut rng, k);
        let rel = *rels.choose(&mut rng).unwrap();
        let mod_a = *mods.choose(&mut rng).unwrap();
        let got = filter_binary(&candidates, rel, &objects, mod_a);
        let want = binary_oracle(&candidates, rel, &objects, mod_a);
        ensure(got == want, || format!("case {case}: {rel:?} {mod_a:?} {candidates:?} vs {objects:?}: {got:?} != {want:?}"))?;

        let mut clock = 0.0;
        let clocks: Vec<Clock> = (0..=k)
            .map(|_| {
                clock += rng.random_range(0.0..40.0);
                clock
            })
            .collect();
        let tokens: Vec<TimeToken> = clocks.iter().enumerate().map(|(index, &clock)| TimeToken { index, clock }).collect();
        let now = clock + rng.random_range(0.0..120.0);
        let pred = *preds.choose(&mut rng).unwrap();
        let got = filter_unary(&candidates, pred, mod_a, &tokens, now);
        let want = unary_oracle(&candidates, pred, mod_a, &clocks, now);
        ensure(got == want, || format!("case {case}: {pred:?} {mod_a:?}: {got:?} != {want:?}"))?;

        let facts: BTreeMap<usize, Vec<u8>> = (0..=k)
            .map(|t| (t, (0..rng.random_range(0..4)).map(|_| rng.random_range(0..5)).collect()))
            .collect();
        let f = if rng.random_bool(0.2) { Frequency::Always } else { Frequency::AtLeast(rng.random_range(0..5)) };
        let got = apply_frequency(&candidates, &facts, f);
        let want = frequency_oracle(&candidates, &facts, f);
        ensure(got == want, || format!("case {case}: {f:?}: {got:?} != {want:?}"))?;
    }
    Ok("1000 binary, unary and frequency instances match brute force".into())
}

fn touch_history_sets() -> Outcome {
    let mut s = Session::new(World::from_json(TOUCH_HISTORY).map_err(|e| e.to_string())?);
    let moves = [
        ("McDonald's", Point3::new(0.5, -0.4, 0.075), 10.0),
        ("Texaco", Point3::new(0.15, 0.0, 0.075), 20.0),
        ("Target", Point3::new(-0.3, 0.5, 0.075), 30.0),
    ];
    for (b, to, clock) in moves {
        s.handle_move(b, to, clock).map_err(|e| e.to_string())?;
    }
    let checks = [
        (
            "Which blocks did the Target block touch before I moved it?",
            "The Target block touched the Starbucks block and the Texaco block.",
        ),
        (
            "Which blocks did the Target block ever touch before I moved it?",
            "The Target block touched the Starbucks block, the McDonald's block and the Texaco block.",
        ),
    ];
    for (i, (q, want)) in checks.iter().enumerate() {
        let r = s.handle_ask(q, 40.0 + i as f64);
        ensure(r.text == *want, || format!("{q:?} answered {:?}", r.text))?;
    }
    Ok("default gives {Starbucks, Texaco}; ever gives {Starbucks, McDonald's, Texaco}".into())
}

fn presupposition_negation() -> Outcome {
    let mut s = Session::new(World::from_json(LOGO_ROW).map_err(|e| e.to_string())?);
    let r = s.handle_ask("What block was the Twitter block on?", 1.0);
    let want = "The Twitter block wasn't on any block.";
    ensure(r.text == want && r.error.is_none(), || format!("answered {:?} ({:?})", r.text, r.error))?;
    Ok(format!("{want:?}"))
}

const VOCAB: &[&str] = &[
    "which", "what", "where", "when", "how", "many", "did", "do", "is", "was", "were", "are", "have", "I", "you", "it",
    "move", "moved", "put", "touch", "touched", "block", "blocks", "the", "a", "any", "red", "green", "blue", "on",
    "top", "of", "near", "between", "and", "or", "before", "after", "since", "until", "during", "just", "right",
    "ever", "always", "first", "last", "recently", "times", "twice", "once", "three", "two", "other", "that", "this",
    "left", "right", "behind", "front", "in", "to", "beginning", "now", "not", "never", "?", ",", "Toyota", "Texaco",
    "Twitter", "Mercedes", "Target", "Starbucks", "Burger", "King", "McDonald's", "Nvidia", "hello",
];

fn fuzz_text(rng: &mut ChaCha8Rng, corpus: &[&str]) -> String {
    match rng.random_range(0..10) {
        0..=4 => {
            let mut words: Vec<String> = corpus.choose(rng).unwrap().split_whitespace().map(String::from).collect();
            for _ in 0..rng.random_range(1..4) {
                let i = rng.random_range(0..words.len().max(1));
                match rng.random_range(0..4) {
                    0 if !words.is_empty() => {
                        words.remove(i);
                    }
                    1 if i + 1 < words.len() => words.swap(i, i + 1),
                    2 => words.insert(i.min(words.len()), VOCAB.choose(rng).unwrap().to_string()),
                    _ if !words.is_empty() => words[i] = VOCAB.choose(rng).unwrap().to_string(),
                    _ => {}
                }
            }
            words.join(" ")
        }
        5..=7 => (0..rng.random_range(0..14)).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(" "),
        8 => (0..rng.random_range(0..40)).map(|_| rng.random::<char>()).collect(),
        _ => match rng.random_range(0..4) {
            0 => String::new(),
            1 => " \t\n ".into(),
            2 => "block ".repeat(rng.random_range(50..400)),
            _ => "((((( ))) |a| $ . ? ''\"".into(),
        },
    }
}

fn fuzzed_asks() -> Outcome {
    let corpus: Vec<&str> = CORPUS.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let world = World::from_json(LOGO_ROW).map_err(|e| e.to_string())?;
    let names: Vec<String> = world.block_names().map(String::from).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xf022);
    let mut session = Session::new(world);
    let mut clock = 0.0;
    let (mut answered, mut refused) = (0, 0);
    let start = Instant::now();
    for i in 0..10_000 {
        clock += rng.random_range(0.0..3.0);
        if i % 25 == 0 {
            let _ = session.handle_move(names.choose(&mut rng).unwrap(), grid_point(&mut rng), clock);
        }
        let text = fuzz_text(&mut rng, &corpus);
        let reply = catch_unwind(AssertUnwindSafe(|| session.handle_ask(&text, clock)))
            .map_err(|_| format!("panic on ask {i}: {text:?}"))?;
        ensure(!reply.text.is_empty(), || format!("empty reply to {text:?}"))?;
        let tail = &session.transcript()[session.transcript().len() - 2..];
        ensure(matches!(tail[1].kind, EventKind::Answer { .. }), || format!("no answer event for {text:?}"))?;
        match reply.error {
            Some(code) => {
                let logged = matches!(&tail[0].kind, EventKind::Error { code: c, .. } if *c == code);
                ensure(logged && reply.ulf.is_none(), || format!("unstructured failure for {text:?}"))?;
                refused += 1;
            }
            None => {
                ensure(reply.ulf.is_some(), || format!("answer without ULF for {text:?}"))?;
                answered += 1;
            }
        }
    }
    Ok(format!("10000 asks, no panics, {answered} answered, {refused} structured refusals, {:?}", start.elapsed()))
}
