//! Line-oriented move REPL.
//!
//! Each line is a move name followed by its parameters, e.g.
//! `boat_move c3` or `reroute_over_handle h4 L1 L5`. Ids may carry their
//! `h`/`L`/`c` prefix or be bare integers. A line may also be a JSON move
//! object as it appears in a trace.

use std::io::{self, BufRead, Write};

use carve_core::diagram::{ChordId, HandleId, LegendrianId, Presentation};
use carve_core::invariants::{census, detect_loose};
use carve_core::moves::Move;
use carve_core::trace::{MoveTrace, Recorder};

const HELP: &str = "\
moves:
  boat_move <chord>
  handleslide_minus <chord>            (slider and target read off the chord)
  handleslide_plus <slider> <over>
  add_cancelling_pair <parallel_to>
  reroute_over_handle <handle> <leg>...
  cancel_plus_minus <plus> <minus>
  cancel_handle_legendrian <handle> <leg>
  cusp_pass_over_handle <leg> <handle>
  attach_flexible <handle>
  slide_off_handle <leg> <flex>
  connect_sum <into> <from>
other:
  census | chords | legendrians | loose <leg> | undo | help | quit";

fn parse_id(token: &str, prefixes: &[char]) -> Result<u32, String> {
    let digits = token.trim_start_matches(prefixes);
    digits
        .parse()
        .map_err(|_| format!("expected an id like {}3, got {token:?}", prefixes[0]))
}

fn chord(t: &str) -> Result<ChordId, String> {
    parse_id(t, &['c']).map(ChordId)
}

fn leg(t: &str) -> Result<LegendrianId, String> {
    parse_id(t, &['L', 'l']).map(LegendrianId)
}

fn handle(t: &str) -> Result<HandleId, String> {
    parse_id(t, &['h']).map(HandleId)
}

/// Parses a move line against the current state.
pub fn parse_move(line: &str, p: &Presentation) -> Result<Move, String> {
    if line.starts_with('{') {
        return serde_json::from_str(line).map_err(|e| format!("bad move JSON: {e}"));
    }
    let mut words = line.split_whitespace();
    let name = words.next().ok_or("empty line")?;
    let args: Vec<&str> = words.collect();
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{name} takes {n} argument(s), got {}", args.len()))
        }
    };
    let mv = match name {
        "boat_move" => {
            arity(1)?;
            Move::BoatMove { chord: chord(args[0])? }
        }
        "handleslide_minus" => {
            arity(1)?;
            let at = chord(args[0])?;
            let c = p.chords.get(&at).ok_or(format!("unknown chord {at}"))?;
            Move::HandleslideMinus { slider: c.from, over: c.to, at }
        }
        "handleslide_plus" => {
            arity(2)?;
            Move::HandleslidePlus { slider: leg(args[0])?, over: leg(args[1])? }
        }
        "add_cancelling_pair" => {
            arity(1)?;
            Move::AddCancellingPair { index: p.n() - 1, parallel_to: leg(args[0])? }
        }
        "reroute_over_handle" => {
            if args.is_empty() {
                return Err("reroute_over_handle needs a handle".into());
            }
            let who = args[1..].iter().map(|a| leg(a)).collect::<Result<_, _>>()?;
            Move::RerouteOverHandle { who, handle: handle(args[0])? }
        }
        "cancel_plus_minus" => {
            arity(2)?;
            Move::CancelPlusMinus { plus: leg(args[0])?, minus: leg(args[1])? }
        }
        "cancel_handle_legendrian" => {
            arity(2)?;
            Move::CancelHandleLegendrian { handle: handle(args[0])?, leg: leg(args[1])? }
        }
        "cusp_pass_over_handle" => {
            arity(2)?;
            Move::CuspPassOverHandle { leg: leg(args[0])?, handle: handle(args[1])? }
        }
        "attach_flexible" => {
            arity(1)?;
            Move::AttachFlexible { through: handle(args[0])? }
        }
        "slide_off_handle" => {
            arity(2)?;
            Move::SlideOffHandle { leg: leg(args[0])?, over_flex: leg(args[1])? }
        }
        "connect_sum" => {
            arity(2)?;
            Move::ConnectSum { into: leg(args[0])?, from: leg(args[1])? }
        }
        other => return Err(format!("unknown command {other:?}; try help")),
    };
    Ok(mv)
}

pub fn write_chords<W: Write + ?Sized>(out: &mut W, p: &Presentation) -> io::Result<()> {
    if p.chords.is_empty() {
        return writeln!(out, "no chords");
    }
    writeln!(out, "{:<6} {:<12} {:>5} {:>10} {:>7} {:>7}", "chord", "from->to", "index", "length", "bounded", "grading")?;
    let mut chords: Vec<_> = p.chords.values().collect();
    chords.sort_by_key(|c| c.order_key());
    for c in chords {
        let index = if c.degenerate { "deg".to_string() } else { c.local_index.to_string() };
        writeln!(
            out,
            "{:<6} {:<12} {:>5} {:>10} {:>7} {:>7}",
            c.id.to_string(),
            format!("{}->{}", c.from, c.to),
            index,
            c.length.to_string(),
            c.bounded,
            c.grading
        )?;
    }
    Ok(())
}

fn write_legendrians<W: Write + ?Sized>(out: &mut W, p: &Presentation) -> io::Result<()> {
    for l in p.legendrians.values() {
        let passes: Vec<String> = l.handle_passes.iter().map(|(h, n)| format!("{h}x{n}")).collect();
        writeln!(
            out,
            "{} {} {:?} {} passes [{}] decorations {}",
            l.id,
            l.name,
            l.role,
            l.coefficient,
            passes.join(" "),
            l.decorations.len()
        )?;
    }
    Ok(())
}

/// Runs a session until `quit` or end of input. Returns the accumulated trace.
pub fn run<R: BufRead, W: Write + ?Sized>(initial: Presentation, input: R, out: &mut W) -> io::Result<MoveTrace> {
    let mut rec = Recorder::new(initial);
    writeln!(out, "{}", census(rec.current()))?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "quit" | "exit" => break,
            "help" => writeln!(out, "{HELP}")?,
            "census" => writeln!(out, "{}", census(rec.current()))?,
            "chords" => write_chords(out, rec.current())?,
            "legendrians" => write_legendrians(out, rec.current())?,
            "undo" => match rec.undo() {
                Some(step) => writeln!(out, "undid {}", step.mv)?,
                None => writeln!(out, "nothing to undo")?,
            },
            _ if line.starts_with("loose ") => match leg(line[6..].trim()) {
                Ok(l) => writeln!(out, "{l}: {}", detect_loose(rec.current(), l))?,
                Err(e) => writeln!(out, "error: {e}")?,
            },
            _ => {
                let parsed = parse_move(line, rec.current());
                match parsed.and_then(|mv| rec.apply(mv).map(|_| ()).map_err(|e| e.to_string())) {
                    Ok(()) => {
                        let step = rec.steps().last().expect("just applied");
                        writeln!(out, "ok {} -> {}", step.mv, step.post_hash)?;
                        writeln!(out, "{}", census(rec.current()))?;
                        write_chords(out, rec.current())?;
                    }
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
        }
    }
    Ok(rec.finish().1)
}
