//! Text formats for signals, truth tables, generator functions and systems.
//!
//! Signals:
//!
//! ```text
//! width 1
//! initial 0
//! at 1 -> 1
//! tail at 3 period 2
//!   +0 -> 0
//!   +1 -> 1
//! ```
//!
//! Truth tables: `in M out N`, then `2^M` rows `bits -> bits` in
//! lexicographic order. Generator tables add a `# phi m=M n=N` header.
//!
//! Systems are s-expressions; see [`parse_system`]. Indices in files are
//! 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::bits::BitVec;
use crate::boolfn::BoolFn;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::rat::{parse_rat, Rat};
use crate::signal::{Event, Signal, Tail};
use crate::system::{default_probes, DelayKind, InitialStateSpec, Limits, System, Target};

fn perr(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { file: file.to_string(), line, message: message.into() }
}

/// Lines with comments stripped, numbered from 1; blank lines dropped.
fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str, &str)> {
    src.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        (!line.trim().is_empty()).then_some((i + 1, line.trim(), raw))
    })
}

fn bits_at(file: &str, line: usize, s: &str) -> Result<BitVec> {
    BitVec::parse(s).map_err(|_| perr(file, line, format!("expected a bit string, found `{s}`")))
}

fn rat_at(file: &str, line: usize, s: &str) -> Result<Rat> {
    parse_rat(s).ok_or_else(|| perr(file, line, format!("expected a time P/Q, found `{s}`")))
}

fn usize_at(file: &str, line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| perr(file, line, format!("expected a count, found `{s}`")))
}

fn arrow<'a>(file: &str, line: usize, s: &'a str) -> Result<(&'a str, &'a str)> {
    s.split_once("->")
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| perr(file, line, format!("expected `A -> B`, found `{s}`")))
}

pub fn parse_signal(src: &str, file: &str) -> Result<Signal> {
    let mut width = None;
    let mut initial = None;
    let mut events = Vec::new();
    let mut tail: Option<(Rat, Rat, Vec<(Rat, BitVec)>)> = None;
    let mut last_line = 0;
    for (n, line, _) in content_lines(src) {
        last_line = n;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "width" if words.len() == 2 && width.is_none() => width = Some(usize_at(file, n, words[1])?),
            "initial" if words.len() == 2 && initial.is_none() => initial = Some(bits_at(file, n, words[1])?),
            "at" if tail.is_none() => {
                let (t, v) = arrow(file, n, &line[2..])?;
                events.push(Event::new(rat_at(file, n, t)?, bits_at(file, n, v)?));
            }
            "tail" if tail.is_none() => {
                if words.len() != 5 || words[1] != "at" || words[3] != "period" {
                    return Err(perr(file, n, "expected `tail at T period P`"));
                }
                tail = Some((rat_at(file, n, words[2])?, rat_at(file, n, words[4])?, Vec::new()));
            }
            w if w.starts_with('+') => {
                let Some((_, _, pattern)) = tail.as_mut() else {
                    return Err(perr(file, n, "pattern line outside a tail block"));
                };
                let (o, v) = arrow(file, n, &line[1..])?;
                pattern.push((rat_at(file, n, o)?, bits_at(file, n, v)?));
            }
            w => return Err(perr(file, n, format!("unexpected `{w}`"))),
        }
    }
    let width = width.ok_or_else(|| perr(file, last_line, "missing `width` line"))?;
    let initial = initial.ok_or_else(|| perr(file, last_line, "missing `initial` line"))?;
    let tail = match tail {
        Some((start, period, pattern)) => {
            if pattern.is_empty() {
                return Err(perr(file, last_line, "tail block has no pattern lines"));
            }
            Some(Tail { start, period, pattern })
        }
        None => None,
    };
    Signal::new(width, initial, events, tail).map_err(|e| perr(file, last_line, e.to_string()))
}

pub fn emit_signal(s: &Signal) -> String {
    let mut out = format!("width {}\ninitial {}\n", s.width(), s.initial());
    for e in s.events() {
        out.push_str(&format!("at {} -> {}\n", e.time, e.value));
    }
    if let Some(t) = s.tail() {
        out.push_str(&format!("tail at {} period {}\n", t.start, t.period));
        for (o, v) in &t.pattern {
            out.push_str(&format!("  +{o} -> {v}\n"));
        }
    }
    out
}

fn header(src: &str, file: &str) -> Result<Option<(usize, usize)>> {
    for (i, raw) in src.lines().enumerate() {
        let t = raw.trim();
        if let Some(rest) = t.strip_prefix('#') {
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.first() == Some(&"phi") {
                let mut m = None;
                let mut n = None;
                for w in &words[1..] {
                    match w.split_once('=') {
                        Some(("m", v)) => m = Some(usize_at(file, i + 1, v)?),
                        Some(("n", v)) => n = Some(usize_at(file, i + 1, v)?),
                        _ => return Err(perr(file, i + 1, format!("bad phi header field `{w}`"))),
                    }
                }
                return match (m, n) {
                    (Some(m), Some(n)) => Ok(Some((m, n))),
                    _ => Err(perr(file, i + 1, "phi header needs m= and n=")),
                };
            }
        }
    }
    Ok(None)
}

pub fn parse_boolfn(src: &str, file: &str) -> Result<BoolFn> {
    let mut lines = content_lines(src);
    let Some((n0, first, _)) = lines.next() else {
        return Err(perr(file, 1, "empty truth table"));
    };
    let w: Vec<&str> = first.split_whitespace().collect();
    if w.len() != 4 || w[0] != "in" || w[2] != "out" {
        return Err(perr(file, n0, "expected `in M out N`"));
    }
    let (m, n) = (usize_at(file, n0, w[1])?, usize_at(file, n0, w[3])?);
    if m == 0 || n == 0 || m > crate::boolfn::MAX_ARITY || n > crate::boolfn::MAX_ARITY {
        return Err(perr(file, n0, format!("arities must be in 1..={}", crate::boolfn::MAX_ARITY)));
    }
    let mut rows: Vec<Option<BitVec>> = vec![None; 1 << m];
    let mut last = n0;
    for (k, line, _) in lines {
        last = k;
        let (a, b) = arrow(file, k, line)?;
        let input = bits_at(file, k, a)?;
        let output = bits_at(file, k, b)?;
        if input.width() != m || output.width() != n {
            return Err(perr(file, k, format!("row `{line}` does not have widths {m} -> {n}")));
        }
        let idx = input.bits() as usize;
        if rows[idx].is_some() {
            return Err(perr(file, k, format!("duplicate row for input {input}")));
        }
        if let Some(missing) = (0..idx).find(|&j| rows[j].is_none()) {
            return Err(perr(file, k, format!("row {input} out of order: missing row for input {}", BitVec::new(m, missing as u64))));
        }
        rows[idx] = Some(output);
    }
    if let Some(missing) = rows.iter().position(|r| r.is_none()) {
        return Err(perr(file, last, format!("missing row for input {}", BitVec::new(m, missing as u64))));
    }
    BoolFn::new(m, n, rows.into_iter().map(Option::unwrap).collect()).map_err(|e| perr(file, n0, e.to_string()))
}

pub fn emit_boolfn(f: &BoolFn) -> String {
    let mut out = format!("in {} out {}\n", f.arity_in(), f.arity_out());
    for (l, r) in BitVec::all_of_width(f.arity_in()).zip(f.rows()) {
        out.push_str(&format!("{l} -> {r}\n"));
    }
    out
}

pub fn parse_generator(src: &str, file: &str) -> Result<Generator> {
    let Some((m, n)) = header(src, file)? else {
        return Err(perr(file, 1, "missing `# phi m=M n=N` header"));
    };
    let table = parse_boolfn(src, file)?;
    if table.arity_in() != m + n || table.arity_out() != n {
        return Err(perr(file, 1, format!("table is not `in {} out {n}` as the header says", m + n)));
    }
    Generator::new(m, n, table).map_err(|e| perr(file, 1, e.to_string()))
}

pub fn emit_generator(g: &Generator) -> String {
    format!("# phi m={} n={}\n{}", g.m(), g.n(), emit_boolfn(g.table()))
}

/// Comma-separated times, e.g. `0,1,5/2,4`.
pub fn parse_times(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_rat(p).ok_or_else(|| Error::Invalid(format!("bad time `{p}`"))))
        .collect()
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn line(&self) -> usize {
        match self {
            Sexp::Atom(_, l) | Sexp::List(_, l) => *l,
        }
    }
}

fn tokenize(src: &str) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("");
        let mut cur = String::new();
        for c in line.chars() {
            if c == '(' || c == ')' || c.is_whitespace() {
                if !cur.is_empty() {
                    out.push((std::mem::take(&mut cur), i + 1));
                }
                if !c.is_whitespace() {
                    out.push((c.to_string(), i + 1));
                }
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            out.push((cur, i + 1));
        }
    }
    out
}

fn read_sexp(tokens: &[(String, usize)], pos: &mut usize, file: &str) -> Result<Sexp> {
    let Some((tok, line)) = tokens.get(*pos) else {
        return Err(perr(file, tokens.last().map_or(1, |t| t.1), "unexpected end of input"));
    };
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((t, _)) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexp::List(items, *line));
                    }
                    Some(_) => items.push(read_sexp(tokens, pos, file)?),
                    None => return Err(perr(file, *line, "unclosed `(`")),
                }
            }
        }
        ")" => Err(perr(file, *line, "unexpected `)`")),
        _ => Ok(Sexp::Atom(tok.clone(), *line)),
    }
}

struct SysParser<'a> {
    file: &'a str,
    base: Option<PathBuf>,
    limits: Limits,
}

impl SysParser<'_> {
    fn err(&self, s: &Sexp, msg: impl Into<String>) -> Error {
        perr(self.file, s.line(), msg)
    }

    fn atom<'s>(&self, s: &'s Sexp) -> Result<&'s str> {
        match s {
            Sexp::Atom(a, _) => Ok(a),
            Sexp::List(..) => Err(self.err(s, "expected an atom")),
        }
    }

    fn list<'s>(&self, s: &'s Sexp) -> Result<(&'s str, &'s [Sexp])> {
        match s {
            Sexp::List(items, _) if !items.is_empty() => Ok((self.atom(&items[0])?, &items[1..])),
            _ => Err(self.err(s, "expected a parenthesized form")),
        }
    }

    fn count(&self, s: &Sexp) -> Result<usize> {
        usize_at(self.file, s.line(), self.atom(s)?)
    }

    /// 1-based index in the file, 0-based in the result.
    fn index(&self, s: &Sexp) -> Result<usize> {
        match self.count(s)? {
            0 => Err(self.err(s, "indices start at 1")),
            i => Ok(i - 1),
        }
    }

    fn rat(&self, s: &Sexp) -> Result<Rat> {
        rat_at(self.file, s.line(), self.atom(s)?)
    }

    fn bits(&self, s: &Sexp) -> Result<BitVec> {
        bits_at(self.file, s.line(), self.atom(s)?)
    }

    fn arity(&self, s: &Sexp, args: &[Sexp], n: usize) -> Result<()> {
        if args.len() != n {
            return Err(self.err(s, format!("expected {n} arguments, found {}", args.len())));
        }
        Ok(())
    }

    fn read_file(&self, s: &Sexp, name: &str) -> Result<(String, String)> {
        let path = match &self.base {
            Some(b) => b.join(name),
            None => PathBuf::from(name),
        };
        let text = fs::read_to_string(&path).map_err(|e| self.err(s, format!("cannot read {}: {e}", path.display())))?;
        Ok((text, path.display().to_string()))
    }

    fn wrap(&self, s: &Sexp, r: Result<System>) -> Result<System> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            e => self.err(s, e.to_string()),
        })
    }

    fn table(&self, s: &Sexp) -> Result<BoolFn> {
        match s {
            Sexp::Atom(name, _) => {
                let (text, path) = self.read_file(s, name)?;
                parse_boolfn(&text, &path)
            }
            _ => {
                let (head, args) = self.list(s)?;
                if head != "tt" || args.len() < 2 {
                    return Err(self.err(s, "expected a truth-table file or `(tt M N ROWS..)`"));
                }
                let (m, n) = (self.count(&args[0])?, self.count(&args[1])?);
                let rows = args[2..].iter().map(|a| self.bits(a)).collect::<Result<Vec<_>>>()?;
                BoolFn::new(m, n, rows).map_err(|e| self.err(s, e.to_string()))
            }
        }
    }

    fn phi(&self, s: &Sexp) -> Result<Generator> {
        match s {
            Sexp::Atom(name, _) => {
                let (text, path) = self.read_file(s, name)?;
                parse_generator(&text, &path)
            }
            _ => {
                let (head, args) = self.list(s)?;
                if head != "phi" || args.len() < 2 {
                    return Err(self.err(s, "expected a generator file or `(phi M N ROWS..)`"));
                }
                let (m, n) = (self.count(&args[0])?, self.count(&args[1])?);
                let rows = args[2..].iter().map(|a| self.bits(a)).collect::<Result<Vec<_>>>()?;
                let table = BoolFn::new(m + n, n, rows).map_err(|e| self.err(s, e.to_string()))?;
                Generator::new(m, n, table).map_err(|e| self.err(s, e.to_string()))
            }
        }
    }

    fn signal(&self, s: &Sexp) -> Result<Signal> {
        match s {
            Sexp::Atom(name, _) => {
                let (text, path) = self.read_file(s, name)?;
                parse_signal(&text, &path)
            }
            _ => {
                let (head, args) = self.list(s)?;
                if head != "sig" || args.len() < 2 {
                    return Err(self.err(s, "expected a signal file or `(sig W INIT ..)`"));
                }
                let w = self.count(&args[0])?;
                let init = self.bits(&args[1])?;
                let mut events = Vec::new();
                let mut tail = None;
                for a in &args[2..] {
                    let (h, xs) = self.list(a)?;
                    match h {
                        "at" => {
                            self.arity(a, xs, 2)?;
                            events.push(Event::new(self.rat(&xs[0])?, self.bits(&xs[1])?));
                        }
                        "tail" if xs.len() >= 3 => {
                            let mut pattern = Vec::new();
                            for p in &xs[2..] {
                                let (ph, pa) = self.list(p)?;
                                if ph != "+" || pa.len() != 2 {
                                    return Err(self.err(p, "expected `(+ OFFSET BITS)`"));
                                }
                                pattern.push((self.rat(&pa[0])?, self.bits(&pa[1])?));
                            }
                            tail = Some(Tail { start: self.rat(&xs[0])?, period: self.rat(&xs[1])?, pattern });
                        }
                        _ => return Err(self.err(a, format!("unexpected `{h}` in signal"))),
                    }
                }
                Signal::new(w, init, events, tail).map_err(|e| self.err(s, e.to_string()))
            }
        }
    }

    fn signals(&self, args: &[Sexp]) -> Result<Vec<Signal>> {
        args.iter().map(|a| self.signal(a)).collect()
    }

    fn delay(&self, s: &Sexp, args: &[Sexp]) -> Result<System> {
        let Some(name) = args.first() else { return Err(self.err(s, "delay-model needs a name")) };
        let name = self.atom(name)?;
        let rest = &args[1..];
        let Some(m) = rest.first() else { return Err(self.err(s, "delay-model needs an input width")) };
        let m = self.count(m)?;
        let p = &rest[1..];
        let kind = match name {
            "eventually-equal" => {
                self.arity(s, p, 1)?;
                DelayKind::EventuallyFollows(Target::Coord(self.index(&p[0])?))
            }
            "eventually-and" => DelayKind::EventuallyFollows(Target::And),
            "zero-if-and-settles" => DelayKind::EventuallyFollows(Target::ZeroIfAndSettles),
            "zero-if-input-settles" => DelayKind::EventuallyFollows(Target::ZeroIfInputSettles),
            "agrees-from-zero" => {
                self.arity(s, p, 1)?;
                DelayKind::AgreesFromZero(self.index(&p[0])?)
            }
            "rise-guarded" => {
                self.arity(s, p, 1)?;
                DelayKind::RiseGuarded { delay: self.rat(&p[0])? }
            }
            "pulse-width" => {
                self.arity(s, p, 2)?;
                DelayKind::PulseWidth { rise: self.rat(&p[0])?, fall: self.rat(&p[1])? }
            }
            "rise-after-settled-and" => {
                self.arity(s, p, 1)?;
                DelayKind::RiseAfterSettledAnd { lookback: self.rat(&p[0])? }
            }
            "limsup-and" => DelayKind::LimSupAnd,
            "inertial" => {
                self.arity(s, p, 2)?;
                DelayKind::InertialBounds { rise: self.rat(&p[0])?, fall: self.rat(&p[1])? }
            }
            "dominates-and" => DelayKind::DominatesAnd,
            "pulse-then-gate" => DelayKind::PulseThenGate,
            "step-or-copy" => DelayKind::StepOrCopy,
            other => return Err(self.err(s, format!("unknown delay model `{other}`"))),
        };
        if !matches!(
            kind,
            DelayKind::EventuallyFollows(Target::Coord(_))
                | DelayKind::AgreesFromZero(_)
                | DelayKind::RiseGuarded { .. }
                | DelayKind::PulseWidth { .. }
                | DelayKind::RiseAfterSettledAnd { .. }
                | DelayKind::InertialBounds { .. }
        ) {
            self.arity(s, p, 0)?;
        }
        self.wrap(s, System::delay_model(m, kind))
    }

    fn init(&self, s: &Sexp, gen: &Generator) -> Result<InitialStateSpec> {
        let (head, args) = self.list(s)?;
        match head {
            "init" => Ok(InitialStateSpec::constant(args.iter().map(|a| self.bits(a)).collect::<Result<Vec<_>>>()?)),
            "init-stable" => InitialStateSpec::stable_states(gen).map_err(|e| self.err(s, e.to_string())),
            "init-map" => {
                let mut map = BTreeMap::new();
                for entry in args {
                    let items = match entry {
                        Sexp::List(items, _) if items.len() >= 2 => items,
                        _ => return Err(self.err(entry, "expected `(INPUT STATE..)`")),
                    };
                    let l = self.bits(&items[0])?;
                    let set: BTreeSet<BitVec> = items[1..].iter().map(|a| self.bits(a)).collect::<Result<_>>()?;
                    map.insert(l, set);
                }
                Ok(InitialStateSpec::FromInput(map))
            }
            _ => Err(self.err(s, "expected `(init ..)`, `(init-stable)` or `(init-map ..)`")),
        }
    }

    fn system(&self, s: &Sexp) -> Result<System> {
        let (head, args) = self.list(s)?;
        let sub = |i: usize| self.system(&args[i]);
        match head {
            "ideal-delay" => {
                let ds = args.iter().map(|a| self.rat(a)).collect::<Result<Vec<_>>>()?;
                self.wrap(s, System::ideal_delay(ds))
            }
            "identity" => {
                self.arity(s, args, 1)?;
                Ok(System::identity(self.count(&args[0])?))
            }
            "pointwise" => {
                self.arity(s, args, 1)?;
                Ok(System::pointwise(self.table(&args[0])?))
            }
            "autonomous" => {
                let (m, sigs) = match args.first() {
                    Some(Sexp::Atom(a, _)) if a.parse::<usize>().is_ok() => (self.count(&args[0])?, &args[1..]),
                    _ => (1, args),
                };
                self.wrap(s, System::autonomous(m, self.signals(sigs)?))
            }
            "universe" => {
                self.arity(s, args, 2)?;
                Ok(System::universe(self.count(&args[0])?, self.count(&args[1])?))
            }
            "delay-model" => self.delay(s, args),
            "generated" => {
                self.arity(s, args, 2)?;
                let gen = self.phi(&args[0])?;
                let init = self.init(&args[1], &gen)?;
                self.wrap(s, System::generated(gen, init))
            }
            "complement" => {
                self.arity(s, args, 1)?;
                Ok(System::complement(sub(0)?))
            }
            "extend" => {
                self.arity(s, args, 1)?;
                Ok(System::extend(sub(0)?))
            }
            "substitute" => {
                self.arity(s, args, 3)?;
                let (i, j) = (self.index(&args[1])?, self.index(&args[2])?);
                self.wrap(s, System::substitute(sub(0)?, i, j))
            }
            "drop" => {
                self.arity(s, args, 2)?;
                let f = sub(0)?;
                let i = self.index(&args[1])?;
                let probes = default_probes(f.arity().0);
                self.wrap(s, System::drop_input(f, i, &probes, &self.limits))
            }
            "intersect" | "union" => {
                self.arity(s, args, 2)?;
                let (f, g) = (sub(0)?, sub(1)?);
                self.wrap(s, if head == "intersect" { System::intersect(f, g) } else { System::union(f, g) })
            }
            "intersect-set" | "union-set" => {
                if args.len() < 2 {
                    return Err(self.err(s, "expected a system and at least one signal"));
                }
                let f = sub(0)?;
                let set = self.signals(&args[1..])?;
                self.wrap(s, if head == "intersect-set" { System::intersect_set(f, set) } else { System::union_set(f, set) })
            }
            "parallel" => {
                let parts = args.iter().map(|a| self.system(a)).collect::<Result<Vec<_>>>()?;
                self.wrap(s, System::parallel(parts))
            }
            "serial" => {
                self.arity(s, args, 2)?;
                let outer = sub(0)?;
                let inner = match &args[1] {
                    Sexp::List(items, _) => items.iter().map(|a| self.system(a)).collect::<Result<Vec<_>>>()?,
                    a => return Err(self.err(a, "expected a list of inner systems")),
                };
                self.wrap(s, System::serial(outer, inner))
            }
            other => Err(self.err(s, format!("unknown system form `{other}`"))),
        }
    }
}

/// Parses a system description; file references are resolved against
/// `base`.
pub fn parse_system(src: &str, file: &str, base: Option<&Path>) -> Result<System> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let sexp = read_sexp(&tokens, &mut pos, file)?;
    if let Some((t, line)) = tokens.get(pos) {
        return Err(perr(file, *line, format!("trailing input `{t}`")));
    }
    let p = SysParser { file, base: base.map(Path::to_path_buf), limits: Limits::default() };
    p.system(&sexp)
}

fn emit_rows(rows: &[BitVec]) -> String {
    rows.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn emit_inline_signal(s: &Signal) -> String {
    let mut out = format!("(sig {} {}", s.width(), s.initial());
    for e in s.events() {
        out.push_str(&format!(" (at {} {})", e.time, e.value));
    }
    if let Some(t) = s.tail() {
        out.push_str(&format!(" (tail {} {}", t.start, t.period));
        for (o, v) in &t.pattern {
            out.push_str(&format!(" (+ {o} {v})"));
        }
        out.push(')');
    }
    out.push(')');
    out
}

fn emit_kind(m: usize, k: &DelayKind) -> String {
    let args = match k {
        DelayKind::EventuallyFollows(Target::Coord(i)) | DelayKind::AgreesFromZero(i) => format!(" {}", i + 1),
        DelayKind::RiseGuarded { delay: d } | DelayKind::RiseAfterSettledAnd { lookback: d } => format!(" {d}"),
        DelayKind::PulseWidth { rise, fall } | DelayKind::InertialBounds { rise, fall } => format!(" {rise} {fall}"),
        _ => String::new(),
    };
    format!("(delay-model {} {m}{args})", k.name())
}

fn emit_set(set: &BTreeSet<Signal>) -> String {
    set.iter().map(emit_inline_signal).collect::<Vec<_>>().join(" ")
}

/// Self-contained text for `f`: every table and signal is inlined.
pub fn emit_system(f: &System) -> String {
    match f {
        System::IdealDelay { delays } => {
            format!("(ideal-delay {})", delays.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" "))
        }
        System::Pointwise(t) => format!("(pointwise (tt {} {} {}))", t.arity_in(), t.arity_out(), emit_rows(t.rows())),
        System::Autonomous { m, set } => format!("(autonomous {m} {})", emit_set(set)),
        System::Universe { m, n } => format!("(universe {m} {n})"),
        System::Delay { m, kind } => emit_kind(*m, kind),
        System::Generated { gen, init } => {
            let init = match init {
                InitialStateSpec::ConstantSet(s) => format!("(init {})", emit_rows(&s.iter().copied().collect::<Vec<_>>())),
                InitialStateSpec::FromInput(map) => {
                    let entries: Vec<String> = map
                        .iter()
                        .map(|(l, s)| format!("({l} {})", emit_rows(&s.iter().copied().collect::<Vec<_>>())))
                        .collect();
                    format!("(init-map {})", entries.join(" "))
                }
            };
            format!("(generated (phi {} {} {}) {init})", gen.m(), gen.n(), emit_rows(gen.table().rows()))
        }
        System::Complement(g) => format!("(complement {})", emit_system(g)),
        System::Extend(g) => format!("(extend {})", emit_system(g)),
        System::Substitute { inner, from, to } => format!("(substitute {} {} {})", emit_system(inner), from + 1, to + 1),
        System::DropInput { inner, index } => format!("(drop {} {})", emit_system(inner), index + 1),
        System::Intersect(a, b) => format!("(intersect {} {})", emit_system(a), emit_system(b)),
        System::Union(a, b) => format!("(union {} {})", emit_system(a), emit_system(b)),
        System::IntersectSet(a, set) => format!("(intersect-set {} {})", emit_system(a), emit_set(set)),
        System::UnionSet(a, set) => format!("(union-set {} {})", emit_system(a), emit_set(set)),
        System::Parallel(parts) => {
            format!("(parallel {})", parts.iter().map(emit_system).collect::<Vec<_>>().join(" "))
        }
        System::Serial { outer, inner } => format!(
            "(serial {} ({}))",
            emit_system(outer),
            inner.iter().map(emit_system).collect::<Vec<_>>().join(" ")
        ),
    }
}
