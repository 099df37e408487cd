//! Line-oriented front end. Plain lines are questions; lines starting with
//! `:` are commands.

use std::io::{BufRead, Write};
use std::time::Instant;

use bwqa_core::session::ClockMode;
use bwqa_core::{Point3, Session};

pub const HELP: &str = "\
:move NAME X Y Z   move a block (NAME may contain spaces)
:scene [TOKEN]     block positions now or at a past time token
:history           transcript so far, one JSON event per line
:save PATH         write the transcript as JSON Lines
:wait SECONDS      advance the simulated clock
:help              this text
:quit              leave
anything else is asked as a question";

pub struct Repl {
    session: Session,
    started: Instant,
    sim_clock: f64,
}

enum Step {
    Continue,
    Quit,
}

impl Repl {
    pub fn new(session: Session) -> Self {
        Repl {
            session,
            started: Instant::now(),
            sim_clock: 0.0,
        }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    fn now(&self) -> f64 {
        match self.session.clock_mode() {
            ClockMode::Real => self.started.elapsed().as_secs_f64(),
            ClockMode::Simulated => self.sim_clock,
        }
    }

    pub fn run(&mut self, input: impl BufRead, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", bwqa_core::surface::GREETING)?;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Step::Quit = self.line(line, &mut out)? {
                break;
            }
        }
        Ok(())
    }

    fn line(&mut self, line: &str, out: &mut impl Write) -> std::io::Result<Step> {
        let Some(cmd) = line.strip_prefix(':') else {
            let reply = self.session.handle_ask(line, self.now());
            writeln!(out, "{}", reply.text)?;
            return Ok(Step::Continue);
        };
        let (head, rest) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
        let rest = rest.trim();
        match head {
            "quit" | "q" | "exit" => return Ok(Step::Quit),
            "help" | "h" => writeln!(out, "{HELP}")?,
            "move" | "m" => match parse_move(rest) {
                Some((block, to)) => match self.session.handle_move(&block, to, self.now()) {
                    Ok(outcome) => writeln!(out, "ok: {outcome:?}")?,
                    Err(e) => writeln!(out, "error: {e}")?,
                },
                None => writeln!(out, "usage: :move NAME X Y Z")?,
            },
            "scene" => {
                let at = match rest {
                    "" => None,
                    t => match t.parse() {
                        Ok(t) => Some(t),
                        Err(_) => {
                            writeln!(out, "usage: :scene [TOKEN]")?;
                            return Ok(Step::Continue);
                        }
                    },
                };
                match self.session.scene_at(at) {
                    Ok(scene) => {
                        for (name, p) in scene.positions() {
                            writeln!(out, "{name}: {p}")?;
                        }
                    }
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
            "history" => write!(out, "{}", self.session.to_jsonl())?,
            "save" if !rest.is_empty() => match self.session.save_transcript(rest.as_ref()) {
                Ok(()) => writeln!(out, "saved {rest}")?,
                Err(e) => writeln!(out, "error: {e}")?,
            },
            "wait" => match rest.parse::<f64>() {
                Ok(s) if s >= 0.0 && s.is_finite() => self.sim_clock += s,
                _ => writeln!(out, "usage: :wait SECONDS")?,
            },
            _ => writeln!(out, "unknown command; try :help")?,
        }
        Ok(Step::Continue)
    }
}

/// `NAME X Y Z`, where NAME is everything before the last three fields.
fn parse_move(args: &str) -> Option<(String, Point3)> {
    let fields: Vec<&str> = args.split_whitespace().collect();
    if fields.len() < 4 {
        return None;
    }
    let (name, nums) = fields.split_at(fields.len() - 3);
    let n: Vec<f64> = nums.iter().map(|s| s.parse().ok()).collect::<Option<_>>()?;
    Some((name.join(" "), Point3::new(n[0], n[1], n[2])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn move_names_may_contain_spaces() {
        let (name, p) = parse_move("Burger King 0.1 -0.2 0.075").unwrap();
        assert_eq!(name, "Burger King");
        assert_eq!(p, Point3::new(0.1, -0.2, 0.075));
        assert!(parse_move("Toyota 1 2").is_none());
        assert!(parse_move("Toyota a b c").is_none());
    }
}
